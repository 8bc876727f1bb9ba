#pragma once

#include "limo/instance.hpp"
#include "limo/rng.hpp"

namespace limo::sa {

/// Metropolis swap-SA schedule, shared shape with the insertion solver so
/// both run the same pass count under identical (p0, beta, p_min).
struct SaParams {
    double p0 = 0.2;
    double beta = 0.9995;
    double p_min = 0.01;
    int swaps_per_pass = 0; // 0 -> n
};

/// Accept with probability 1 when delta < 0, else exp(-delta/temperature).
bool metropolis_accept(double delta, double temperature, Rng& rng);

/// Swap-based simulated annealing from a seeded random permutation.
/// Temperature per pass is p * d_max; returns the best tour ever observed.
Tour solve(const Instance& inst, const SaParams& params, std::uint64_t seed);

} // namespace limo::sa
