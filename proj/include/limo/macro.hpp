#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "limo/instance.hpp"
#include "limo/rng.hpp"

namespace limo::macro {

/// Piecewise-constant decrement schedule driving the 16-bit reference word.
/// Segment i applies its slope to passes in [previous end, pass_end).
/// Passes beyond the last segment reuse the last slope.
struct ScheduleTable {
    struct Segment {
        int slope;
        int pass_end;
    };

    std::uint32_t initial_word = 0;
    std::vector<Segment> segments;

    /// Built-in tables "decay_0.9995" and "decay_0.995" (piecewise-linear
    /// fits of the geometric schedules). initial_word equals the table's
    /// total decrement so the word reaches zero on the final tabulated pass.
    static ScheduleTable builtin(std::string_view name);

    /// Load from a config file: one "slope, pass_end" pair per line.
    static ScheduleTable load(const std::filesystem::path& file);

    long long total_decrement() const;
    int slope_at(int pass) const;
};

/// One word register decrement. Returns the new word and whether the
/// annealing is finished (word smaller than the decrement value).
std::pair<std::uint32_t, bool> schedule_step(const ScheduleTable& table, int pass,
                                             std::uint32_t r_ref);

/// Datapath geometry and knobs. Defaults model the real macro: a 16-bit
/// global word, 4-bit couplings, 16 cities, 5 batched problems.
struct MacroConfig {
    int global_bits = 16;
    int local_bits = 4;
    int max_cities = 16;
    int problems_per_macro = 5;
    /// Survival predicate for the local gate. false (default) stores the
    /// closeness threshold 2^b - q so survival probability tracks the linear
    /// gate; true keeps the raw [r < q] comparison for ablation.
    bool literal_gate_polarity = false;
    ScheduleTable schedule = ScheduleTable::builtin("decay_0.9995");
};

/// Random-word source of the twin. Counts consumed bits so the per-position
/// datapath consumption is testable.
class TrngModel {
  public:
    explicit TrngModel(std::uint64_t seed) : rng_(seed) {}
    std::uint32_t word(int bits) {
        bits_ += static_cast<std::uint64_t>(bits);
        return rng_.word(static_cast<unsigned>(bits));
    }
    std::uint64_t bits_drawn() const { return bits_; }

  private:
    Rng rng_;
    std::uint64_t bits_ = 0;
};

/// Weight matrix scaled onto b-bit unsigned codes:
/// q(d) = min(2^b - 1, floor(d / d_max * (2^b - 1) + 0.5)).
struct QuantizedWeights {
    int n = 0;
    int bits = 0;
    std::vector<std::uint8_t> codes; // n*n, zero diagonal
    double d_max = 0.0;
    bool degenerate = false; // all cities coincident; codes all zero

    std::span<const std::uint8_t> row(int i) const {
        return {codes.data() + static_cast<size_t>(i) * static_cast<size_t>(n),
                static_cast<size_t>(n)};
    }
};

QuantizedWeights quantize_weights(const Instance& inst, std::span<const int> cities, int bits);

/// Threshold comparison r < d: true with probability d / 2^N for an N-bit
/// uniform r.
inline bool threshold_bit(std::uint32_t r, std::uint32_t d) { return r < d; }

/// Draw a fresh global word and compare against the reference word
/// (clamped to the word width).
bool global_bit(TrngModel& trng, std::uint32_t r_ref, int bits = 16);

/// Survival mask from per-city threshold comparisons against fresh local
/// words (one word per entry of qrow).
std::uint32_t local_gate_mask(std::span<const std::uint8_t> qrow, TrngModel& trng,
                              const MacroConfig& config = {});

/// Same comparison against an already-drawn word bank (shared across the
/// problems of a batch).
std::uint32_t local_gate_mask_words(std::span<const std::uint8_t> qrow,
                                    std::span<const std::uint32_t> words,
                                    const MacroConfig& config = {});

/// Lowest-coupling index among survivors AND candidates, ties to the lowest
/// index; falls back to the candidate set when no survivor remains.
/// Throws when candidates is empty.
int comparator_select(std::uint32_t survivors, std::uint32_t candidates,
                      std::span<const std::uint8_t> qrow);

/// A sub-problem mapped onto the macro: quantized couplings, candidate
/// register, spin storage, and the best tour found so far (true-metric cost).
struct MacroProblem {
    int n = 0;
    std::vector<int> ids; // global city ids, ascending; slots index into this
    QuantizedWeights qw;
    Mode mode = Mode::closed;
    int start_slot = 0;
    int end_slot = -1; // open mode only
    std::uint32_t candidate_mask = 0;
    std::vector<int> spin_storage; // chosen slots, position order
    Tour best;                     // empty order until the first pass completes
    const Instance* inst = nullptr;

    int positions() const { return mode == Mode::closed ? n : n - 1; }
};

MacroProblem make_problem(const Instance& inst, std::span<const int> cities, Mode mode, int start,
                          int end, const MacroConfig& config = {});

/// Clear spin storage and rebuild the candidate register with the pins
/// withheld (start always; end too in open mode).
void reset_pass(MacroProblem& problem);

struct TraceRecord {
    int pass;
    int position;
    int problem;
    bool global_bit;
    std::uint32_t survivor_mask; // raw local-gate output; 0 on greedy steps
    int selection;               // local slot
};
using TraceSink = std::function<void(const TraceRecord&)>;

/// One tour position across a batch: draws one global bit and, if set, one
/// bank of max_cities local words, then applies them to every problem that
/// still has an insertion at this position.
void macro_insertion_step(std::span<MacroProblem> problems, int position, std::uint32_t r_ref,
                          TrngModel& trng, const MacroConfig& config, int pass = 0,
                          const TraceSink* trace = nullptr);

/// Full pass/index/problem loop: every pass runs all positions with the
/// current reference word, re-evaluates each problem's tour at true cost,
/// keeps strict improvements, then steps the schedule; finishes when the
/// word drops below the decrement. Returns one best tour per problem.
std::vector<Tour> macro_anneal(std::span<MacroProblem> problems, const MacroConfig& config,
                               std::uint64_t seed, const TraceSink* trace = nullptr);

/// Sign-quantized vector-matrix multiply: per column j of a rows x cols
/// ternary matrix, +1 when sum_i input_i * w_ij >= 0 else -1 (zero maps
/// to +1). inputs are 0/1 bits; weights in {-1, 0, +1}.
std::vector<int> vmm_sign(std::span<const int> inputs, std::span<const int> weights, int rows,
                          int cols);

} // namespace limo::macro
