#pragma once

#include <cstdint>
#include <random>

namespace perisem {

using Engine = std::mt19937_64;

enum class Stream : std::uint64_t {
  kBrownian = 1,
  kJumps = 2,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Per-stream seed derivation:
///   seed = splitmix64(splitmix64(master) ^ splitmix64(4 * replicate + kind))
/// Distinct (replicate, kind) pairs map to distinct counters, so streams never
/// share a seed for a given master.
constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t replicate,
                                    Stream kind) noexcept {
  const std::uint64_t counter = 4 * replicate + static_cast<std::uint64_t>(kind);
  return splitmix64(splitmix64(master) ^ splitmix64(counter));
}

/// The two independent generators a single Monte Carlo replicate draws from.
struct ReplicateRng {
  Engine brownian;
  Engine jumps;

  static ReplicateRng make(std::uint64_t master, std::uint64_t replicate) {
    return ReplicateRng{Engine(stream_seed(master, replicate, Stream::kBrownian)),
                        Engine(stream_seed(master, replicate, Stream::kJumps))};
  }
};

}  // namespace perisem
