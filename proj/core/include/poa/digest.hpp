#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "poa/types.hpp"

namespace poa {

/// Incremental SHA-256 over little-endian encoded fields.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(Sha256&&) noexcept;
  Sha256& operator=(Sha256&&) noexcept;
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& update(std::span<const std::uint8_t> bytes);
  Sha256& update(std::string_view text);
  Sha256& update_u64(std::uint64_t v);
  Sha256& update_u32(std::uint32_t v);
  Sha256& update(const Digest& d) { return update(std::span<const std::uint8_t>(d)); }

  Digest finish();

 private:
  struct Ctx;
  std::unique_ptr<Ctx> ctx_;
};

Digest sha256(std::string_view text);

/// First eight bytes of a digest read big-endian.
std::uint64_t digest_prefix_u64(const Digest& d);

std::string to_hex(const Digest& d);

/// FNV-1a accumulator used for cheap rolling digests (event logs).
class Fnv1a64 {
 public:
  void add(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      state_ ^= (v >> (8 * i)) & 0xffU;
      state_ *= 0x100000001b3ULL;
    }
  }
  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_{0xcbf29ce484222325ULL};
};

}  // namespace poa
