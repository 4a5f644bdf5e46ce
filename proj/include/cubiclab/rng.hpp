#pragma once

#include <cmath>
#include <cstdint>

namespace cubiclab {

// Counter-based generator: output k is a fixed mixing function of (key, k).
// Identical on every platform; no std::distribution is used anywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++ctr_); }

    // Independent stream derived from this one's key and the stream index.
    Rng split(std::uint64_t stream) const {
        Rng r;
        r.key_ = mix(key_ ^ mix(stream + 0x3c6ef372fe94f82bULL));
        return r;
    }

    // Uniform in [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform in [0,1) with 64 random bits.
    long double uniform_ld() { return static_cast<long double>(next()) * 0x1.0p-64L; }

    // Uniform integer in [0, n), n > 0, rejection-free up to 2^-64 bias removal.
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }

    bool bernoulli(double p) { return uniform() < p; }

    std::uint64_t counter() const { return ctr_; }

private:
    std::uint64_t key_ = 0;
    std::uint64_t ctr_ = 0;
};

}  // namespace cubiclab
