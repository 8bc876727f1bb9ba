#pragma once

#include <span>

#include "limo/instance.hpp"
#include "limo/rng.hpp"

namespace limo::swai {

using limo::Mode;

/// Annealed-insertion schedule and boundary conditions. The loop runs while
/// p >= p_min with p decaying by beta per constructed tour.
struct SwaiParams {
    double p0 = 0.2;
    double beta = 0.9995;
    double p_min = 0.01;
    Mode mode = Mode::closed;
    int start = 0;
    int end = -1; // open mode only
};

/// Linear selection gate: 1 - d/d_max. Domain: 0 <= d <= d_max, d_max > 0.
double linear_gate(double d, double d_max);

/// Index i with probability weights[i] / sum(weights); uniform fallback when
/// every weight is zero. Throws on an empty sequence.
int proportional_select(std::span<const double> weights, Rng& rng);

/// Number of constructed tours for a (p0, beta, p_min) schedule.
int pass_count(double p0, double beta, double p_min);

/// One left-to-right tour construction at stochasticity p: per position a
/// global Bernoulli(p) bit picks between gate-weighted stochastic insertion
/// and greedy nearest-unused insertion (ties to the lowest city index). Open
/// mode withholds `end` and appends it after the last insertion.
Tour construct_pass(const Instance& inst, std::span<const int> cities, const SwaiParams& params,
                    double p, Rng& rng);

/// Full annealing loop; returns the best tour over all passes (strict
/// improvement, first-found best wins among equals).
Tour solve(const Instance& inst, std::span<const int> cities, const SwaiParams& params,
           std::uint64_t seed);

/// Same loop, but construction sees the weight matrix quantized to the given
/// bit width (best-tour comparison still uses true costs). Used for the
/// bit-width studies.
Tour solve_quantized(const Instance& inst, std::span<const int> cities, const SwaiParams& params,
                     std::uint64_t seed, int bits);

} // namespace limo::swai
