#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "limo/clustering.hpp"
#include "limo/instance.hpp"
#include "limo/macro.hpp"

namespace limo::hier {

enum class Engine { ideal_swai, macro_twin };

std::string_view engine_name(Engine e);

/// Pipeline configuration. The (p0, beta, p_min) schedule drives the ideal
/// engine; the macro engine runs its own slope-table schedule from `macro`.
struct SolveOptions {
    Engine engine = Engine::ideal_swai;
    double p0 = 0.3;
    double beta = 0.995;
    double p_min = 0.05;
    int n_refine = 10;
    int k_neighbors = 20;
    int segment_len = 16;
    int max_cluster_size = 16;
    bool enable_segment_refine = true;
    bool enable_two_opt = true;
    int workers = 1;
    std::uint64_t seed = 1;
    macro::MacroConfig macro;
};

/// Leveled clustering. levels[i] holds the level-(i+1) clusters, whose
/// members are level-i entity ids (level 0 entities are the cities).
/// Each level partitions the one below; the top level has <= 16 clusters.
struct Hierarchy {
    std::vector<std::vector<cluster::Cluster>> levels;
    int top() const { return static_cast<int>(levels.size()); }
};

/// Bottom-up PCA-bisection clustering until a level with <= 16 clusters
/// appears. Needs a coordinate instance.
Hierarchy build_hierarchy(const Instance& inst, int M = 16);

/// Entry and exit member per cluster, indexed like the clusters span.
struct LinkAssignment {
    std::vector<int> entry;
    std::vector<int> exit;
};

/// Pin entry/exit members from the closest inter-cluster pair of each
/// adjacent cluster pair along the (cyclic) cluster tour; clusters with >= 2
/// members get distinct pins (exit re-picked when a collision appears).
/// Distances come from member_space, the instance over member entity ids.
LinkAssignment fix_links(std::span<const int> cluster_order,
                         std::span<const cluster::Cluster> clusters,
                         const Instance& member_space);

/// Order every cluster's members as an open path from its entry to its exit
/// pin using the configured engine. Singleton and 2-member clusters bypass
/// the solver. Cluster solves are independent (seed derived per cluster) and
/// run on up to opts.workers threads.
std::vector<std::vector<int>> solve_level(std::span<const cluster::Cluster> clusters,
                                          const LinkAssignment& links,
                                          const Instance& member_space, const SolveOptions& opts,
                                          std::uint64_t stage_seed);

/// Concatenate per-cluster paths in cluster-tour order into a closed tour
/// over the lower level. Validates pins and the permutation property.
Tour stitch(std::span<const int> cluster_order, std::span<const cluster::Cluster> clusters,
            std::span<const std::vector<int>> paths, const LinkAssignment& links,
            const Instance& member_space);

/// Re-optimize contiguous chunks of segment_len nodes (random cyclic offset
/// per pass) as open paths pinned at the chunk endpoints; a chunk is
/// replaced only on strict improvement. Chunks are independent within a
/// pass and run on up to opts.workers threads.
Tour refine_segments(const Instance& space, Tour tour, int segment_len, int passes,
                     const SolveOptions& opts, std::uint64_t stage_seed);

/// First-improvement 2-opt sweeps restricted to each city's K nearest
/// neighbors; stops when a full sweep finds no improving exchange.
Tour two_opt_knn(const Instance& space, Tour tour, int K);

/// K nearest cities per city, ascending distance (ties by index).
std::vector<std::vector<int>> knn_lists(const Instance& space, int K);

/// Full pipeline: hierarchy construction, top-level solve, link fixing,
/// parallel open-TSP cluster solves, stitching, segment refinement and
/// K-neighbor 2-opt per level. Instances with n <= 16 are solved directly.
Tour hierarchical_solve(const Instance& inst, const SolveOptions& opts);

} // namespace limo::hier
