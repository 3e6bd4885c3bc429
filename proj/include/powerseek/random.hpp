#pragma once

#include "powerseek/numeric.hpp"

#include <cstdint>
#include <limits>

namespace powerseek {

/// SplitMix64.  All randomness in the toolkit derives from one 64-bit master
/// seed: stream k of seed s is SplitMix64(derive_seed(s, k)), so work split
/// across threads draws the same numbers as a serial run.
class SplitMix64 {
   public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform integer in [0, bound) without modulo bias.
    std::uint64_t below(std::uint64_t bound);

   private:
    std::uint64_t state_;
};

/// Seed of stream `stream` under master seed `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Uniform draw from [0, upper].  Rational: a dyadic grid point
/// upper * k / 2^24 (exactly reproducible).  double: 53-bit uniform.
template <typename Scalar>
Scalar uniform_scalar(SplitMix64& rng, const Scalar& upper);

}  // namespace powerseek
