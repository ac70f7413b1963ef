#pragma once

#include <cmath>
#include <cstdint>
#include <random>

// Input generators for the property suites. Deliberately separate from the
// library's own Rng so a bug there cannot hide behind matching draws.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(engine_); }
    std::uint64_t bits() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

inline bool close(double a, double b, double tol) {
    return std::abs(a - b) <= tol;
}
