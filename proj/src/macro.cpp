#include "limo/macro.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace limo::macro {

ScheduleTable ScheduleTable::builtin(std::string_view name) {
    ScheduleTable t;
    if (name == "decay_0.9995") {
        t.segments = {{10, 267}, {8, 575}, {7, 940}, {5, 1386},
                      {4, 1961}, {3, 2772}, {2, 4158}, {1, 5990}};
    } else if (name == "decay_0.995") {
        t.segments = {{10, 27}, {8, 57}, {7, 94}, {5, 138}, {4, 196}, {3, 277}, {2, 358}};
    } else {
        throw std::invalid_argument("unknown schedule table: " + std::string(name));
    }
    t.initial_word = static_cast<std::uint32_t>(t.total_decrement());
    return t;
}

ScheduleTable ScheduleTable::load(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open schedule file " + file.string());
    ScheduleTable t;
    std::string line;
    while (std::getline(in, line)) {
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream ls(line);
        int slope, pass_end;
        if (ls >> slope >> pass_end) t.segments.push_back({slope, pass_end});
    }
    if (t.segments.empty()) throw std::runtime_error("empty schedule file " + file.string());
    int prev = 0;
    for (auto& s : t.segments) {
        if (s.slope <= 0 || s.pass_end <= prev)
            throw std::runtime_error("schedule segments need positive slopes and strictly "
                                     "increasing pass ends");
        prev = s.pass_end;
    }
    t.initial_word = static_cast<std::uint32_t>(t.total_decrement());
    return t;
}

long long ScheduleTable::total_decrement() const {
    long long total = 0;
    int prev = 0;
    for (const auto& s : segments) {
        total += static_cast<long long>(s.slope) * (s.pass_end - prev);
        prev = s.pass_end;
    }
    return total;
}

int ScheduleTable::slope_at(int pass) const {
    if (segments.empty()) throw std::invalid_argument("empty schedule table");
    for (const auto& s : segments)
        if (pass < s.pass_end) return s.slope;
    return segments.back().slope;
}

std::pair<std::uint32_t, bool> schedule_step(const ScheduleTable& table, int pass,
                                             std::uint32_t r_ref) {
    if (pass < 0) throw std::invalid_argument("pass index must be non-negative");
    const auto slope = static_cast<std::uint32_t>(table.slope_at(pass));
    if (r_ref < slope) return {r_ref, true};
    return {r_ref - slope, false};
}

QuantizedWeights quantize_weights(const Instance& inst, std::span<const int> cities, int bits) {
    if (bits < 1 || bits > 8) throw std::invalid_argument("quantization bits must be in [1,8]");
    std::vector<int> ids(cities.begin(), cities.end());
    std::sort(ids.begin(), ids.end());
    if (ids.size() < 2) throw std::invalid_argument("quantization needs >= 2 cities");

    QuantizedWeights qw;
    qw.n = static_cast<int>(ids.size());
    qw.bits = bits;
    const auto n = static_cast<size_t>(qw.n);
    qw.codes.assign(n * n, 0);
    qw.d_max = inst.max_distance(ids);
    if (qw.d_max <= 0.0) {
        qw.degenerate = true;
        return qw;
    }
    const double top = static_cast<double>((1 << bits) - 1);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            double d = inst.distance(ids[i], ids[j]);
            auto code = static_cast<std::uint8_t>(
                std::min(top, std::floor(d / qw.d_max * top + 0.5)));
            qw.codes[i * n + j] = qw.codes[j * n + i] = code;
        }
    }
    return qw;
}

bool global_bit(TrngModel& trng, std::uint32_t r_ref, int bits) {
    const std::uint32_t cap = (bits >= 32) ? 0xffffffffu : ((1u << bits) - 1u);
    return threshold_bit(trng.word(bits), std::min(r_ref, cap));
}

namespace {

std::uint32_t gate_bit(std::uint8_t code, std::uint32_t word, const MacroConfig& config) {
    if (config.literal_gate_polarity) return threshold_bit(word, code) ? 1u : 0u;
    const std::uint32_t closeness = (1u << config.local_bits) - code;
    return threshold_bit(word, closeness) ? 1u : 0u;
}

} // namespace

std::uint32_t local_gate_mask(std::span<const std::uint8_t> qrow, TrngModel& trng,
                              const MacroConfig& config) {
    std::uint32_t mask = 0;
    for (size_t i = 0; i < qrow.size(); ++i)
        mask |= gate_bit(qrow[i], trng.word(config.local_bits), config) << i;
    return mask;
}

std::uint32_t local_gate_mask_words(std::span<const std::uint8_t> qrow,
                                    std::span<const std::uint32_t> words,
                                    const MacroConfig& config) {
    if (words.size() < qrow.size())
        throw std::invalid_argument("local word bank smaller than coupling row");
    std::uint32_t mask = 0;
    for (size_t i = 0; i < qrow.size(); ++i) mask |= gate_bit(qrow[i], words[i], config) << i;
    return mask;
}

int comparator_select(std::uint32_t survivors, std::uint32_t candidates,
                      std::span<const std::uint8_t> qrow) {
    if (candidates == 0) throw std::invalid_argument("empty candidate register");
    std::uint32_t pool = survivors & candidates;
    if (pool == 0) pool = candidates; // greedy fallback
    int best = -1;
    for (size_t i = 0; i < qrow.size(); ++i) {
        if (!(pool & (1u << i))) continue;
        if (best < 0 || qrow[i] < qrow[static_cast<size_t>(best)]) best = static_cast<int>(i);
    }
    if (best < 0) throw std::invalid_argument("candidate register addresses no city");
    return best;
}

MacroProblem make_problem(const Instance& inst, std::span<const int> cities, Mode mode, int start,
                          int end, const MacroConfig& config) {
    MacroProblem p;
    p.ids.assign(cities.begin(), cities.end());
    std::sort(p.ids.begin(), p.ids.end());
    if (std::adjacent_find(p.ids.begin(), p.ids.end()) != p.ids.end())
        throw std::invalid_argument("duplicate city in subset");
    p.n = static_cast<int>(p.ids.size());
    if (p.n < 2) throw std::invalid_argument("macro problem needs >= 2 cities");
    if (p.n > config.max_cities)
        throw std::invalid_argument("macro problem exceeds " +
                                    std::to_string(config.max_cities) + " cities");
    p.mode = mode;
    auto slot_of = [&](int city) {
        auto it = std::lower_bound(p.ids.begin(), p.ids.end(), city);
        if (it == p.ids.end() || *it != city)
            throw std::invalid_argument("pin city " + std::to_string(city) + " not in subset");
        return static_cast<int>(it - p.ids.begin());
    };
    p.start_slot = slot_of(start);
    if (mode == Mode::open) {
        p.end_slot = slot_of(end);
        if (p.end_slot == p.start_slot)
            throw std::invalid_argument("open mode needs start != end");
    }
    p.qw = quantize_weights(inst, p.ids, config.local_bits);
    p.inst = &inst;
    p.best.closed = mode == Mode::closed;
    p.best.cost = std::numeric_limits<double>::infinity();
    reset_pass(p);
    return p;
}

void reset_pass(MacroProblem& problem) {
    problem.spin_storage.clear();
    problem.spin_storage.push_back(problem.start_slot);
    std::uint32_t mask = (problem.n >= 32) ? 0xffffffffu : ((1u << problem.n) - 1u);
    mask &= ~(1u << problem.start_slot);
    if (problem.mode == Mode::open) mask &= ~(1u << problem.end_slot);
    problem.candidate_mask = mask;
}

void macro_insertion_step(std::span<MacroProblem> problems, int position, std::uint32_t r_ref,
                          TrngModel& trng, const MacroConfig& config, int pass,
                          const TraceSink* trace) {
    if (position < 2) throw std::invalid_argument("insertion positions start at 2");
    const bool g = global_bit(trng, r_ref, config.global_bits);
    std::vector<std::uint32_t> bank;
    if (g) {
        bank.resize(static_cast<size_t>(config.max_cities));
        for (auto& w : bank) w = trng.word(config.local_bits);
    }
    for (size_t pi = 0; pi < problems.size(); ++pi) {
        MacroProblem& p = problems[pi];
        if (position > p.positions()) continue; // no insertion at this index
        const int prev = p.spin_storage.back();
        auto qrow = p.qw.row(prev);
        std::uint32_t survivors = 0;
        int sel;
        if (g) {
            survivors = local_gate_mask_words(qrow, bank, config);
            sel = comparator_select(survivors, p.candidate_mask, qrow);
        } else {
            sel = comparator_select(~0u, p.candidate_mask, qrow);
        }
        p.spin_storage.push_back(sel);
        p.candidate_mask &= ~(1u << sel);
        if (trace)
            (*trace)({pass, position, static_cast<int>(pi), g, survivors, sel});
    }
}

std::vector<Tour> macro_anneal(std::span<MacroProblem> problems, const MacroConfig& config,
                               std::uint64_t seed, const TraceSink* trace) {
    if (problems.empty()) throw std::invalid_argument("empty problem batch");
    if (static_cast<int>(problems.size()) > config.problems_per_macro)
        throw std::invalid_argument("batch exceeds " +
                                    std::to_string(config.problems_per_macro) + " problems");
    if (config.schedule.segments.empty()) throw std::invalid_argument("empty schedule table");

    TrngModel trng(seed);
    int index_max = 0;
    for (const auto& p : problems) index_max = std::max(index_max, p.positions());

    std::uint32_t r_ref = config.schedule.initial_word;
    for (int pass = 0;; ++pass) {
        for (auto& p : problems) reset_pass(p);
        for (int position = 2; position <= index_max; ++position)
            macro_insertion_step(problems, position, r_ref, trng, config, pass, trace);
        for (auto& p : problems) {
            std::vector<int> order;
            order.reserve(static_cast<size_t>(p.n));
            for (int slot : p.spin_storage) order.push_back(p.ids[static_cast<size_t>(slot)]);
            if (p.mode == Mode::open) order.push_back(p.ids[static_cast<size_t>(p.end_slot)]);
            double cost = p.inst->tour_length(order, p.mode == Mode::closed);
            if (cost < p.best.cost) {
                p.best.order = std::move(order);
                p.best.cost = cost;
            }
        }
        auto [next, done] = schedule_step(config.schedule, pass, r_ref);
        if (done) break;
        r_ref = next;
    }

    std::vector<Tour> out;
    out.reserve(problems.size());
    for (auto& p : problems) out.push_back(p.best);
    return out;
}

std::vector<int> vmm_sign(std::span<const int> inputs, std::span<const int> weights, int rows,
                          int cols) {
    if (rows < 0 || cols < 0 || inputs.size() != static_cast<size_t>(rows) ||
        weights.size() != static_cast<size_t>(rows) * static_cast<size_t>(cols))
        throw std::invalid_argument("vmm shape mismatch");
    for (int v : inputs)
        if (v != 0 && v != 1) throw std::invalid_argument("inputs must be 0/1 bits");
    std::vector<int> out(static_cast<size_t>(cols), 0);
    for (int j = 0; j < cols; ++j) {
        long long acc = 0;
        for (int i = 0; i < rows; ++i) {
            int w = weights[static_cast<size_t>(i) * static_cast<size_t>(cols) +
                            static_cast<size_t>(j)];
            if (w < -1 || w > 1) throw std::invalid_argument("weights must be ternary");
            acc += static_cast<long long>(inputs[static_cast<size_t>(i)]) * w;
        }
        out[static_cast<size_t>(j)] = acc < 0 ? -1 : 1;
    }
    return out;
}

} // namespace limo::macro
