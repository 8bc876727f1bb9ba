#pragma once

#include <span>

#include "limo/instance.hpp"

namespace limo::oracle {

/// Exact solver output. optimal_cost == tour_length(tour.order) and no tour
/// over the same city set with the same boundary conditions is shorter.
struct OracleResult {
    Tour tour;
    double optimal_cost = 0.0;
};

inline constexpr int kBruteForceLimit = 10;
inline constexpr int kHeldKarpLimit = 18;

/// Exhaustive enumeration over (m-1)!/2 canonical cycles, m <= 10.
/// Returns the lexicographically smallest optimal order (first city =
/// smallest index, orientation fixed by second city < last city).
OracleResult brute_force_closed(const Instance& inst, std::span<const int> cities);

/// Optimal closed tour by subset dynamic programming, m <= 18.
/// Output canonicalized like brute_force_closed.
OracleResult held_karp_closed(const Instance& inst, std::span<const int> cities);

/// Optimal Hamiltonian path over cities from start to end, m <= 18.
OracleResult held_karp_open(const Instance& inst, std::span<const int> cities, int start,
                            int end);

} // namespace limo::oracle
