#include "limo/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace limo::oracle {

namespace {

std::vector<int> sorted_subset(const Instance& inst, std::span<const int> cities) {
    std::vector<int> ids(cities.begin(), cities.end());
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        throw std::invalid_argument("duplicate city in subset");
    if (!ids.empty() && (ids.front() < 0 || ids.back() >= inst.n()))
        throw std::out_of_range("subset index out of range");
    return ids;
}

// Orientation canonicalization for a closed tour that already starts at the
// smallest index: force second city < last city. Cost is then recomputed on
// the canonical order so equal tours from different solvers compare bitwise.
void canonicalize_closed(std::vector<int>& order) {
    if (order.size() >= 3 && order[1] > order.back())
        std::reverse(order.begin() + 1, order.end());
}

} // namespace

OracleResult brute_force_closed(const Instance& inst, std::span<const int> cities) {
    auto ids = sorted_subset(inst, cities);
    const int m = static_cast<int>(ids.size());
    if (m < 2) throw std::invalid_argument("closed tour needs >= 2 cities");
    if (m > kBruteForceLimit)
        throw std::length_error("brute force limited to " + std::to_string(kBruteForceLimit) +
                                " cities, got " + std::to_string(m) + " (use Held-Karp)");

    std::vector<int> rest(ids.begin() + 1, ids.end());
    std::vector<int> order(static_cast<size_t>(m));
    std::vector<int> best_order;
    double best = std::numeric_limits<double>::infinity();
    order[0] = ids[0];
    do {
        // Canonical orientation only; the reverse cycle has equal length.
        if (m >= 3 && rest.front() > rest.back()) continue;
        std::copy(rest.begin(), rest.end(), order.begin() + 1);
        double cost = inst.tour_length(order, true);
        if (cost < best) {
            best = cost;
            best_order = order;
        }
    } while (std::next_permutation(rest.begin(), rest.end()));

    double cost = inst.tour_length(best_order, true);
    return {Tour{std::move(best_order), true, cost}, cost};
}

OracleResult held_karp_closed(const Instance& inst, std::span<const int> cities) {
    auto ids = sorted_subset(inst, cities);
    const int m = static_cast<int>(ids.size());
    if (m < 2) throw std::invalid_argument("closed tour needs >= 2 cities");
    if (m > kHeldKarpLimit)
        throw std::length_error("Held-Karp limited to " + std::to_string(kHeldKarpLimit) +
                                " cities, got " + std::to_string(m));

    if (m == 2) {
        std::vector<int> order{ids[0], ids[1]};
        double cost = inst.tour_length(order, true);
        return {Tour{std::move(order), true, cost}, cost};
    }

    // dp over subsets of ids[1..m-1]; dp[mask][j] = shortest path from ids[0]
    // through exactly the cities of mask, ending at ids[j+1].
    const int k = m - 1;
    const size_t nmask = size_t{1} << k;
    std::vector<double> w(static_cast<size_t>(m) * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) w[static_cast<size_t>(i) * m + j] = inst.distance(ids[i], ids[j]);

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dp(nmask * k, inf);
    std::vector<int8_t> parent(nmask * k, -1);
    for (int j = 0; j < k; ++j) dp[(size_t{1} << j) * k + j] = w[0 * m + (j + 1)];

    for (size_t mask = 1; mask < nmask; ++mask) {
        for (int j = 0; j < k; ++j) {
            if (!(mask & (size_t{1} << j))) continue;
            double cur = dp[mask * k + j];
            if (cur == inf) continue;
            size_t rem = (~mask) & (nmask - 1);
            for (size_t bits = rem; bits;) {
                int t = std::countr_zero(bits);
                bits &= bits - 1;
                size_t nmask2 = mask | (size_t{1} << t);
                double cand = cur + w[static_cast<size_t>(j + 1) * m + (t + 1)];
                double& slot = dp[nmask2 * k + t];
                if (cand < slot) {
                    slot = cand;
                    parent[nmask2 * k + t] = static_cast<int8_t>(j);
                }
            }
        }
    }

    const size_t full = nmask - 1;
    double best = inf;
    int last = -1;
    for (int j = 0; j < k; ++j) {
        double cand = dp[full * k + j] + w[static_cast<size_t>(j + 1) * m + 0];
        if (cand < best) {
            best = cand;
            last = j;
        }
    }

    std::vector<int> order(static_cast<size_t>(m));
    size_t mask = full;
    for (int pos = m - 1; pos >= 1; --pos) {
        order[static_cast<size_t>(pos)] = ids[last + 1];
        int p = parent[mask * k + last];
        mask &= ~(size_t{1} << last);
        last = p;
    }
    order[0] = ids[0];

    canonicalize_closed(order);
    double cost = inst.tour_length(order, true);
    return {Tour{std::move(order), true, cost}, cost};
}

OracleResult held_karp_open(const Instance& inst, std::span<const int> cities, int start,
                            int end) {
    auto ids = sorted_subset(inst, cities);
    const int m = static_cast<int>(ids.size());
    if (m == 0) throw std::invalid_argument("empty city subset");
    if (m > kHeldKarpLimit)
        throw std::length_error("Held-Karp limited to " + std::to_string(kHeldKarpLimit) +
                                " cities, got " + std::to_string(m));
    auto member = [&](int c) { return std::binary_search(ids.begin(), ids.end(), c); };
    if (!member(start) || !member(end))
        throw std::invalid_argument("start/end pins must belong to the city subset");
    if (m == 1) return {Tour{{start}, false, 0.0}, 0.0};
    if (start == end) throw std::invalid_argument("open path needs start != end");

    // Path cost is direction independent; evaluate on the canonical direction
    // so (s,e) and (e,s) agree bitwise.
    auto path_cost = [&](const std::vector<int>& order) {
        if (order.front() < order.back()) return inst.tour_length(order, false);
        std::vector<int> rev(order.rbegin(), order.rend());
        return inst.tour_length(rev, false);
    };

    if (m == 2) {
        std::vector<int> order{start, end};
        double cost = path_cost(order);
        return {Tour{std::move(order), false, cost}, cost};
    }

    // Same DP as the closed case, with ids reordered so start sits at slot 0,
    // and the answer read at end over the full mask.
    std::vector<int> rest;
    rest.reserve(static_cast<size_t>(m - 1));
    for (int c : ids)
        if (c != start) rest.push_back(c);

    const int k = m - 1;
    const size_t nmask = size_t{1} << k;
    std::vector<double> w(static_cast<size_t>(m) * m);
    auto id_at = [&](int idx) { return idx == 0 ? start : rest[static_cast<size_t>(idx - 1)]; };
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) w[static_cast<size_t>(i) * m + j] = inst.distance(id_at(i), id_at(j));

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dp(nmask * k, inf);
    std::vector<int8_t> parent(nmask * k, -1);
    for (int j = 0; j < k; ++j) dp[(size_t{1} << j) * k + j] = w[0 * m + (j + 1)];

    for (size_t mask = 1; mask < nmask; ++mask) {
        for (int j = 0; j < k; ++j) {
            if (!(mask & (size_t{1} << j))) continue;
            double cur = dp[mask * k + j];
            if (cur == inf) continue;
            size_t rem = (~mask) & (nmask - 1);
            for (size_t bits = rem; bits;) {
                int t = std::countr_zero(bits);
                bits &= bits - 1;
                size_t nmask2 = mask | (size_t{1} << t);
                double cand = cur + w[static_cast<size_t>(j + 1) * m + (t + 1)];
                double& slot = dp[nmask2 * k + t];
                if (cand < slot) {
                    slot = cand;
                    parent[nmask2 * k + t] = static_cast<int8_t>(j);
                }
            }
        }
    }

    int end_slot = -1;
    for (int j = 0; j < k; ++j)
        if (rest[static_cast<size_t>(j)] == end) end_slot = j;

    std::vector<int> order(static_cast<size_t>(m));
    size_t mask = nmask - 1;
    int last = end_slot;
    for (int pos = m - 1; pos >= 1; --pos) {
        order[static_cast<size_t>(pos)] = rest[static_cast<size_t>(last)];
        int p = parent[mask * k + last];
        mask &= ~(size_t{1} << last);
        last = p;
    }
    order[0] = start;

    double cost = path_cost(order);
    return {Tour{std::move(order), false, cost}, cost};
}

} // namespace limo::oracle
