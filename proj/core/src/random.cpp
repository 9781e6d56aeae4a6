#include "poa/random.hpp"

namespace poa {

Rng make_stream(std::uint64_t master, StreamTag tag, std::uint64_t a, std::uint64_t b) {
  auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(master), hi(master), static_cast<std::uint32_t>(tag), lo(a), hi(a), lo(b), hi(b)};
  return Rng(seq);
}

std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

}  // namespace poa
