// Seeded random numbers for all randomized checks. Doubles are built from raw
// mt19937_64 output rather than std::uniform_real_distribution so streams do
// not depend on the standard library's distribution internals.
#pragma once

#include <cstdint>
#include <random>

#include "nlgrad/grid.h"

namespace nlgrad {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t bits() { return eng_(); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t index(std::uint64_t n) { return eng_() % n; }

    // Derive an independent, reproducible substream (used so experiments can
    // run in any order without perturbing each other's draws).
    Rng fork(std::uint64_t salt) {
        return Rng(bits() ^ (salt * 0x9e3779b97f4a7c15ULL));
    }

    ScalarField field(const DomainGrid& g, double lo = -1.0, double hi = 1.0) {
        ScalarField u(g);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] = uniform(lo, hi);
        return u;
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace nlgrad
