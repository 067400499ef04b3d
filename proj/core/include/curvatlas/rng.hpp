#pragma once

#include <cstdint>

namespace curvatlas {

// Counter-based deterministic RNG.  Child streams are derived by hashing
// (master seed, counter), so trial ordering and thread count cannot affect
// the draws.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ (0x632be59bd9b4e019ULL * (index + 1)));
}

class Rng {
public:
    using result_type = std::uint64_t;
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ULL; }

    std::uint64_t next_u64() { return splitmix64(state_ += 0x9e3779b97f4a7c15ULL); }
    result_type operator()() { return next_u64(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection-free modulo is fine here; n is tiny relative to 2^64.
        return next_u64() % n;
    }

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::uint64_t state_;
};

}  // namespace curvatlas
