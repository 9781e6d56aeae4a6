#pragma once

#include <cstdint>
#include <random>

namespace poa {

using Rng = std::mt19937_64;

/// Independent stream families derived from one master seed.
enum class StreamTag : std::uint32_t {
  Node = 1,
  Link = 2,
  Workload = 3,
  Oracle = 4,
  VrfKey = 5,
  Adversary = 6,
};

/// Derives a stream from (master, tag, a, b) through std::seed_seq, so the
/// stream of one (node, link, ...) does not depend on how many others exist.
Rng make_stream(std::uint64_t master, StreamTag tag, std::uint64_t a = 0, std::uint64_t b = 0);

/// Uniform integer in [lo, hi].
std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi);

}  // namespace poa
