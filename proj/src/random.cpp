#include "powerseek/random.hpp"

namespace powerseek {

std::uint64_t SplitMix64::below(std::uint64_t bound) {
    if (bound == 0) throw InvalidArgument("SplitMix64::below: zero bound");
    const std::uint64_t limit = max() - (max() % bound);
    while (true) {
        const std::uint64_t x = (*this)();
        if (x < limit) return x % bound;
    }
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 mix(seed ^ (stream * 0xd1b54a32d192ed03ULL));
    mix();
    return mix();
}

template <>
Rational uniform_scalar<Rational>(SplitMix64& rng, const Rational& upper) {
    constexpr std::uint64_t kGrid = std::uint64_t{1} << 24;
    const std::uint64_t k = rng.below(kGrid + 1);
    Rational fraction(mpz_class(static_cast<unsigned long>(k)), mpz_class(static_cast<unsigned long>(kGrid)));
    fraction.canonicalize();
    return upper * fraction;
}

template <>
double uniform_scalar<double>(SplitMix64& rng, const double& upper) {
    return upper * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace powerseek
