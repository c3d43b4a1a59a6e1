#pragma once

#include <array>
#include <cstdint>

namespace statreg {

/// Counter-based generator (Philox4x32-10, Salmon et al. 2011). A draw is a pure
/// function of (key, stream, index), so replicates and coordinates can be
/// generated in any order or in parallel with identical results.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Raw 4x32 block number `block`.
  std::array<std::uint32_t, 4> block(std::uint64_t block) const;

  /// Uniform on the open interval (0, 1), coordinate `index`.
  double uniform(std::uint64_t index) const;

  /// Standard normal coordinate `index` (Box-Muller on one Philox block per pair).
  double normal(std::uint64_t index) const;

  /// Fair random sign, coordinate `index`.
  double sign(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

/// Mixes two identifiers into one stream id (SplitMix64 finalizer).
std::uint64_t combine_stream(std::uint64_t a, std::uint64_t b);

}  // namespace statreg
