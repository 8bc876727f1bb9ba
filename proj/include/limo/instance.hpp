#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace limo {

/// Error for malformed or unsupported TSPLIB input.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Edge weight conventions. The TSPLIB ones follow the reference formulas
/// bit-exactly; REAL_EUC is the unrounded Euclidean norm used for random
/// unit-square instances and for centroid meta-nodes.
enum class Metric { EUC_2D, CEIL_2D, GEO, ATT, EXPLICIT, REAL_EUC };

std::string_view metric_name(Metric m);

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// A symmetric TSP instance: city coordinates (or an explicit weight matrix)
/// plus the metric convention. Immutable after construction; all distances
/// are non-negative and finite, distance(i,i) == 0.
class Instance {
  public:
    /// Parse TSPLIB95 text (NODE_COORD_SECTION or EDGE_WEIGHT_SECTION).
    /// Supported EDGE_WEIGHT_TYPEs: EUC_2D, CEIL_2D, GEO, ATT, EXPLICIT
    /// (FULL_MATRIX, UPPER_ROW, LOWER_DIAG_ROW layouts).
    static Instance parse_tsplib(const std::string& text);
    static Instance load_tsplib(const std::filesystem::path& file);

    /// n cities i.i.d. uniform on the unit square, REAL_EUC metric.
    /// Identical (n, seed) gives an identical instance.
    static Instance random_uniform(int n, std::uint64_t seed);

    /// Build from raw points with a coordinate metric.
    static Instance from_points(std::string name, std::vector<Point> coords, Metric metric);

    /// Build from a full symmetric matrix (row-major n*n), EXPLICIT metric.
    static Instance from_matrix(std::string name, int n, std::vector<double> weights);

    const std::string& name() const { return name_; }
    int n() const { return n_; }
    Metric metric() const { return metric_; }
    const std::vector<Point>& coords() const { return coords_; }

    /// Edge weight between cities i and j under the instance metric.
    double distance(int i, int j) const;

    /// Largest pairwise weight within a city subset (all cities when empty).
    double max_distance(std::span<const int> cities = {}) const;

    /// Sum of consecutive edge weights; adds the closing edge iff closed.
    /// Throws std::invalid_argument on duplicate or out-of-range indices.
    double tour_length(std::span<const int> order, bool closed) const;

    /// Serialize to TSPLIB text (coordinate metrics emit NODE_COORD_SECTION,
    /// EXPLICIT emits a FULL_MATRIX section).
    std::string to_tsplib() const;

  private:
    Instance() = default;

    std::string name_;
    int n_ = 0;
    Metric metric_ = Metric::REAL_EUC;
    std::vector<Point> coords_;          // empty for EXPLICIT
    std::vector<double> weights_;        // n*n, EXPLICIT only
    std::vector<double> geo_lat_, geo_lon_; // precomputed radians, GEO only
};

/// Boundary condition of a sub-problem: closed cycle or open path with
/// pinned endpoints.
enum class Mode { closed, open };

/// An ordering of city indices with its realized cost. Open tours are
/// Hamiltonian paths with pinned endpoints; closed tours include the
/// return edge in the cost.
struct Tour {
    std::vector<int> order;
    bool closed = true;
    double cost = 0.0;
};

/// True iff order is a permutation of {0..n-1}.
bool is_permutation(std::span<const int> order, int n);

/// found / optimal (Eq-style deviation ratio); >= 1 against a true optimum.
/// Throws std::invalid_argument when optimal <= 0.
double deviation_ratio(double found, double optimal);

/// Write a TSPLIB .tour file (TOUR_SECTION, 1-based indices, -1 terminator).
void write_tour_file(const std::filesystem::path& file, const std::string& name,
                     std::span<const int> order);

} // namespace limo
