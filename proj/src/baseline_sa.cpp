#include "limo/baseline_sa.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace limo::sa {

bool metropolis_accept(double delta, double temperature, Rng& rng) {
    if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
    if (delta < 0.0) return true;
    double x = delta / temperature;
    if (x > 700.0) return false; // exp underflow clamp
    return rng.uniform01() < std::exp(-x);
}

namespace {

// Cost change of swapping the cities at tour positions i and j (closed tour).
double swap_delta(const Instance& inst, const std::vector<int>& order, int i, int j) {
    const int n = static_cast<int>(order.size());
    auto at = [&](int k) { return order[static_cast<size_t>((k % n + n) % n)]; };
    const int a = at(i), b = at(j);
    if ((i + 1) % n == j) {
        // ... pa a b nb ...
        return inst.distance(at(i - 1), b) + inst.distance(a, at(j + 1)) -
               inst.distance(at(i - 1), a) - inst.distance(b, at(j + 1));
    }
    if ((j + 1) % n == i) {
        return inst.distance(at(j - 1), a) + inst.distance(b, at(i + 1)) -
               inst.distance(at(j - 1), b) - inst.distance(a, at(i + 1));
    }
    double removed = inst.distance(at(i - 1), a) + inst.distance(a, at(i + 1)) +
                     inst.distance(at(j - 1), b) + inst.distance(b, at(j + 1));
    double added = inst.distance(at(i - 1), b) + inst.distance(b, at(i + 1)) +
                   inst.distance(at(j - 1), a) + inst.distance(a, at(j + 1));
    return added - removed;
}

} // namespace

Tour solve(const Instance& inst, const SaParams& params, std::uint64_t seed) {
    const int n = inst.n();
    if (n < 3) throw std::invalid_argument("swap SA needs n >= 3");
    if (!(params.p_min < params.p0) || !(params.beta > 0.0 && params.beta < 1.0))
        throw std::invalid_argument("invalid SA schedule");
    const int swaps = params.swaps_per_pass > 0 ? params.swaps_per_pass : n;
    const double d_max = inst.max_distance();

    Rng rng(seed);
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    for (int k = n - 1; k > 0; --k) { // Fisher-Yates
        auto r = static_cast<int>(rng.index(static_cast<size_t>(k + 1)));
        std::swap(order[static_cast<size_t>(k)], order[static_cast<size_t>(r)]);
    }

    double cur = inst.tour_length(order, true);
    std::vector<int> best_order = order;
    double best_cur = cur;

    for (double p = params.p0; p >= params.p_min; p *= params.beta) {
        const double temperature = p * d_max;
        for (int s = 0; s < swaps; ++s) {
            int i = static_cast<int>(rng.index(static_cast<size_t>(n)));
            int j = static_cast<int>(rng.index(static_cast<size_t>(n - 1)));
            if (j >= i) ++j;
            double delta = swap_delta(inst, order, i, j);
            if (temperature > 0.0 ? metropolis_accept(delta, temperature, rng) : delta < 0.0) {
                std::swap(order[static_cast<size_t>(i)], order[static_cast<size_t>(j)]);
                cur += delta;
                if (cur < best_cur) {
                    best_cur = cur;
                    best_order = order;
                }
            }
        }
    }

    Tour t;
    t.order = std::move(best_order);
    t.closed = true;
    t.cost = inst.tour_length(t.order, true); // exact, free of accumulation drift
    return t;
}

} // namespace limo::sa
