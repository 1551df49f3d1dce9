#pragma once

#include <cstdint>
#include <random>

namespace spikecept {

// Deterministic RNG wrapper. std::mt19937_64 is fully specified by the
// standard, but the distribution classes are not; all value derivation
// happens here so streams are bit-identical across compilers.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        // modulo bias is negligible for the population sizes used here
        return gen_() % n;
    }

    bool bernoulli(double p) { return next_double() < p; }

private:
    std::mt19937_64 gen_;
};

// Mixes independent stream identifiers into one seed, so that e.g. the
// encoder stream for (seed, image, retry) never collides with the
// weight-init stream. SplitMix64 finalizer.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0,
                              std::uint64_t c = 0, std::uint64_t d = 0) {
    std::uint64_t z = a;
    for (std::uint64_t x : {b, c, d}) {
        z += 0x9e3779b97f4a7c15ull + x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z = z ^ (z >> 31);
    }
    return z;
}

} // namespace spikecept
