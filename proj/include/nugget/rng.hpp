#pragma once

#include <cstdint>

namespace nugget {

/// Seedable PCG32 generator (XSH-RR output on a 64-bit LCG state).
///
/// The sample stream is fully specified by the seed and stream id, and all
/// derived draws (uniform, normal, integers) use integer arithmetic plus
/// log/sqrt only, so streams are stable across platforms and compilers.
/// `split(id)` derives an independent child from the construction seed,
/// regardless of how many draws the parent has made.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  Rng split(std::uint64_t id) const;

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  // [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Unbiased integer in [0, n); n must be positive.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }
  // Standard normal via the Marsaglia polar method.
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t state_ = 0;
  std::uint64_t inc_ = 1;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace nugget
