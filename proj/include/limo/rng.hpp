#pragma once

#include <cstdint>
#include <random>

namespace limo {

/// Stateless 64-bit mixer (splitmix64 finalizer). Used to derive independent
/// stream seeds from (master seed, unit path) so that scheduling order never
/// affects which random stream a work unit sees.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for a child stream identified by a path of ids under a master seed.
template <typename... Ids>
constexpr std::uint64_t derive_seed(std::uint64_t master, Ids... ids) {
    std::uint64_t s = mix64(master);
    ((s = mix64(s ^ mix64(static_cast<std::uint64_t>(ids)))), ...);
    return s;
}

/// Deterministic random stream. Thin wrapper over mt19937_64 that exposes
/// exactly the draw shapes the solvers need; all call sites share one
/// definition of "uniform double" and "uniform word" so results are
/// reproducible across the codebase.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, 2^bits), bits in [1, 32].
    std::uint32_t word(unsigned bits) { return static_cast<std::uint32_t>(gen_() >> (64 - bits)); }

    /// Uniform index in [0, n), n >= 1. Multiply-shift; bias is O(n/2^64).
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>((static_cast<unsigned __int128>(gen_()) * n) >> 64);
    }

    std::uint64_t raw() { return gen_(); }

  private:
    std::mt19937_64 gen_;
};

} // namespace limo
