#pragma once

#include <cmath>
#include <cstdint>

namespace longalign {

// Deterministic, platform-independent RNG (splitmix64 core). The standard
// <random> distributions are not pinned across library versions, so every
// seeded quantity in the library goes through this generator to keep runs
// byte-for-byte reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // Derive an independent stream, e.g. per (seed, resample index).
    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        Rng base(seed);
        std::uint64_t mixed = base.next_u64() ^ (index * 0x9e3779b97f4a7c15ULL);
        return Rng(mixed + 0x2545f4914f6cdd1dULL);
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 bits of entropy.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n) (n > 0), unbiased enough for our cohort sizes.
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

    // Box-Muller, one value per call (the pair's second half is discarded to
    // keep the stream layout simple and stable).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

} // namespace longalign
