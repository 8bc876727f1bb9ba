#include "limo/swai.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "limo/macro.hpp"

namespace limo::swai {

double linear_gate(double d, double d_max) {
    if (!(d_max > 0.0)) throw std::invalid_argument("linear gate needs d_max > 0");
    if (d < 0.0 || d > d_max) throw std::invalid_argument("linear gate needs 0 <= d <= d_max");
    return 1.0 - d / d_max;
}

int proportional_select(std::span<const double> weights, Rng& rng) {
    if (weights.empty()) throw std::invalid_argument("proportional selection over empty set");
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) return static_cast<int>(rng.index(weights.size()));
    double x = rng.uniform01() * total;
    double acc = 0.0;
    int last_positive = 0;
    for (size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] > 0.0) last_positive = static_cast<int>(i);
        acc += weights[i];
        if (x < acc) return static_cast<int>(i);
    }
    return last_positive; // float fallthrough guard
}

int pass_count(double p0, double beta, double p_min) {
    int count = 0;
    for (double p = p0; p >= p_min; p *= beta) ++count;
    return count;
}

namespace {

// A sub-problem prepared for repeated construction passes: ascending city
// ids, a dense working-weight matrix (true or quantized), and local slots
// for the pins.
struct Sub {
    std::vector<int> ids;
    int m = 0;
    std::vector<double> w; // m*m working weights
    double wmax = 0.0;
    Mode mode = Mode::closed;
    int start_slot = 0;
    int end_slot = -1;
};

Sub make_sub(const Instance& inst, std::span<const int> cities, const SwaiParams& params,
             int quant_bits) {
    Sub sub;
    sub.ids.assign(cities.begin(), cities.end());
    std::sort(sub.ids.begin(), sub.ids.end());
    if (std::adjacent_find(sub.ids.begin(), sub.ids.end()) != sub.ids.end())
        throw std::invalid_argument("duplicate city in subset");
    sub.m = static_cast<int>(sub.ids.size());
    if (sub.m < 2) throw std::invalid_argument("solver needs >= 2 cities");
    sub.mode = params.mode;

    auto slot_of = [&](int city) {
        auto it = std::lower_bound(sub.ids.begin(), sub.ids.end(), city);
        if (it == sub.ids.end() || *it != city)
            throw std::invalid_argument("pin city " + std::to_string(city) + " not in subset");
        return static_cast<int>(it - sub.ids.begin());
    };
    sub.start_slot = slot_of(params.start);
    if (params.mode == Mode::open) {
        sub.end_slot = slot_of(params.end);
        if (sub.end_slot == sub.start_slot)
            throw std::invalid_argument("open mode needs start != end");
    }

    const auto m = static_cast<size_t>(sub.m);
    sub.w.assign(m * m, 0.0);
    if (quant_bits > 0) {
        auto q = macro::quantize_weights(inst, sub.ids, quant_bits);
        for (size_t i = 0; i < m * m; ++i) sub.w[i] = static_cast<double>(q.codes[i]);
    } else {
        for (size_t i = 0; i < m; ++i)
            for (size_t j = i + 1; j < m; ++j)
                sub.w[i * m + j] = sub.w[j * m + i] = inst.distance(sub.ids[i], sub.ids[j]);
    }
    sub.wmax = *std::max_element(sub.w.begin(), sub.w.end());
    return sub;
}

struct Scratch {
    std::vector<int> unused;
    std::vector<double> gates;
    std::vector<int> order;
};

// One construction pass over local slots. Candidate scans run in ascending
// slot order, so distance ties resolve to the lowest city index.
void construct_local(const Sub& sub, double p, Rng& rng, Scratch& s) {
    const auto m = static_cast<size_t>(sub.m);
    s.unused.clear();
    for (int i = 0; i < sub.m; ++i)
        if (i != sub.start_slot && i != sub.end_slot) s.unused.push_back(i);
    s.order.clear();
    s.order.push_back(sub.start_slot);

    while (!s.unused.empty()) {
        const int prev = s.order.back();
        const double* row = sub.w.data() + static_cast<size_t>(prev) * m;
        const bool stochastic = rng.uniform01() < p;
        size_t pick;
        if (stochastic) {
            s.gates.resize(s.unused.size());
            for (size_t i = 0; i < s.unused.size(); ++i)
                s.gates[i] = sub.wmax > 0.0 ? 1.0 - row[s.unused[i]] / sub.wmax : 1.0;
            pick = static_cast<size_t>(proportional_select(s.gates, rng));
        } else {
            pick = 0;
            for (size_t i = 1; i < s.unused.size(); ++i)
                if (row[s.unused[i]] < row[s.unused[pick]]) pick = i;
        }
        s.order.push_back(s.unused[pick]);
        s.unused.erase(s.unused.begin() + static_cast<ptrdiff_t>(pick));
    }
    if (sub.mode == Mode::open) s.order.push_back(sub.end_slot);
}

Tour finish_tour(const Instance& inst, const Sub& sub, const std::vector<int>& local) {
    Tour t;
    t.closed = sub.mode == Mode::closed;
    t.order.reserve(local.size());
    for (int slot : local) t.order.push_back(sub.ids[static_cast<size_t>(slot)]);
    t.cost = inst.tour_length(t.order, t.closed);
    return t;
}

Tour solve_impl(const Instance& inst, std::span<const int> cities, const SwaiParams& params,
                std::uint64_t seed, int quant_bits) {
    Sub sub = make_sub(inst, cities, params, quant_bits);
    Rng rng(seed);
    Scratch s;
    Tour best;
    best.cost = std::numeric_limits<double>::infinity();
    for (double p = params.p0; p >= params.p_min; p *= params.beta) {
        construct_local(sub, p, rng, s);
        Tour t = finish_tour(inst, sub, s.order);
        if (t.cost < best.cost) best = std::move(t);
    }
    if (best.order.empty()) { // p0 < p_min: degenerate schedule, one greedy pass
        construct_local(sub, 0.0, rng, s);
        best = finish_tour(inst, sub, s.order);
    }
    return best;
}

} // namespace

Tour construct_pass(const Instance& inst, std::span<const int> cities, const SwaiParams& params,
                    double p, Rng& rng) {
    Sub sub = make_sub(inst, cities, params, 0);
    Scratch s;
    construct_local(sub, p, rng, s);
    return finish_tour(inst, sub, s.order);
}

Tour solve(const Instance& inst, std::span<const int> cities, const SwaiParams& params,
           std::uint64_t seed) {
    return solve_impl(inst, cities, params, seed, 0);
}

Tour solve_quantized(const Instance& inst, std::span<const int> cities, const SwaiParams& params,
                     std::uint64_t seed, int bits) {
    if (bits < 1 || bits > 8) throw std::invalid_argument("quantization bits must be in [1,8]");
    return solve_impl(inst, cities, params, seed, bits);
}

} // namespace limo::swai
