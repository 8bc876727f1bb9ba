#include "limo/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "limo/parallel.hpp"
#include "limo/swai.hpp"

namespace limo::hier {

namespace {

constexpr double kGainTol = 1e-9;

// Seed-path tags for the pipeline stages.
enum : std::uint64_t {
    kTagDirect = 0x01,
    kTagTopSolve = 0x02,
    kTagLevelSolve = 0x03,
    kTagRefine = 0x04,
    kTagRefineDirect = 0x05,
    kTagOffsets = 0x06,
};

Tour engine_solve(const Instance& space, std::span<const int> cities, Mode mode, int start,
                  int end, const SolveOptions& opts, std::uint64_t seed) {
    if (opts.engine == Engine::macro_twin) {
        auto problem = macro::make_problem(space, cities, mode, start, end, opts.macro);
        std::span<macro::MacroProblem> batch(&problem, 1);
        return macro::macro_anneal(batch, opts.macro, seed).front();
    }
    swai::SwaiParams params;
    params.p0 = opts.p0;
    params.beta = opts.beta;
    params.p_min = opts.p_min;
    params.mode = mode;
    params.start = start;
    params.end = end;
    return swai::solve(space, cities, params, seed);
}

Instance centroid_space(const std::vector<cluster::Cluster>& clusters, const std::string& name) {
    std::vector<Point> pts;
    pts.reserve(clusters.size());
    for (const auto& c : clusters) pts.push_back(c.centroid);
    return Instance::from_points(name, std::move(pts), Metric::REAL_EUC);
}

} // namespace

std::string_view engine_name(Engine e) {
    return e == Engine::ideal_swai ? "ideal" : "macro";
}

Hierarchy build_hierarchy(const Instance& inst, int M) {
    if (inst.n() < 2) throw std::invalid_argument("hierarchy needs n >= 2");
    if (inst.coords().empty())
        throw std::invalid_argument("hierarchy construction needs city coordinates");
    Hierarchy h;
    std::vector<Point> current = inst.coords();
    do {
        auto clusters = cluster::build_clusters(current, M);
        std::vector<Point> centroids;
        centroids.reserve(clusters.size());
        for (const auto& c : clusters) centroids.push_back(c.centroid);
        h.levels.push_back(std::move(clusters));
        current = std::move(centroids);
    } while (static_cast<int>(current.size()) > 16);
    return h;
}

LinkAssignment fix_links(std::span<const int> cluster_order,
                         std::span<const cluster::Cluster> clusters,
                         const Instance& member_space) {
    const auto k = cluster_order.size();
    if (k < 2) throw std::invalid_argument("link fixing needs >= 2 clusters");
    LinkAssignment links;
    links.entry.assign(clusters.size(), -1);
    links.exit.assign(clusters.size(), -1);

    auto best_pair = [&](const cluster::Cluster& a, const cluster::Cluster& b,
                         int exclude_from_a) {
        double best = std::numeric_limits<double>::infinity();
        std::pair<int, int> arg{-1, -1};
        for (int ma : a.members) {
            if (ma == exclude_from_a) continue;
            for (int mb : b.members) {
                double d = member_space.distance(ma, mb);
                if (d < best) {
                    best = d;
                    arg = {ma, mb};
                }
            }
        }
        return arg;
    };

    for (size_t t = 0; t < k; ++t) {
        int a = cluster_order[t];
        int b = cluster_order[(t + 1) % k];
        auto [ma, mb] = best_pair(clusters[static_cast<size_t>(a)],
                                  clusters[static_cast<size_t>(b)], -1);
        links.exit[static_cast<size_t>(a)] = ma;
        links.entry[static_cast<size_t>(b)] = mb;
    }

    // Entry == exit on a multi-member cluster breaks the open path; re-pick
    // the outgoing link without the entry member. A final sweep handles the
    // wrap-around case without touching the neighbor's entry again.
    for (size_t t = 0; t < k; ++t) {
        int c = cluster_order[t];
        const auto& cl = clusters[static_cast<size_t>(c)];
        if (cl.members.size() < 2 || links.entry[static_cast<size_t>(c)] != links.exit[static_cast<size_t>(c)])
            continue;
        int next = cluster_order[(t + 1) % k];
        auto [ma, mb] = best_pair(cl, clusters[static_cast<size_t>(next)],
                                  links.entry[static_cast<size_t>(c)]);
        links.exit[static_cast<size_t>(c)] = ma;
        links.entry[static_cast<size_t>(next)] = mb;
    }
    for (size_t t = 0; t < k; ++t) {
        int c = cluster_order[t];
        const auto& cl = clusters[static_cast<size_t>(c)];
        if (cl.members.size() < 2 || links.entry[static_cast<size_t>(c)] != links.exit[static_cast<size_t>(c)])
            continue;
        int next = cluster_order[(t + 1) % k];
        int target = links.entry[static_cast<size_t>(next)];
        double best = std::numeric_limits<double>::infinity();
        int pick = -1;
        for (int ma : cl.members) {
            if (ma == links.entry[static_cast<size_t>(c)]) continue;
            double d = member_space.distance(ma, target);
            if (d < best) {
                best = d;
                pick = ma;
            }
        }
        links.exit[static_cast<size_t>(c)] = pick;
    }
    return links;
}

std::vector<std::vector<int>> solve_level(std::span<const cluster::Cluster> clusters,
                                          const LinkAssignment& links,
                                          const Instance& member_space, const SolveOptions& opts,
                                          std::uint64_t stage_seed) {
    std::vector<std::vector<int>> paths(clusters.size());
    parallel_for(static_cast<int>(clusters.size()), opts.workers, [&](int i) {
        const auto& cl = clusters[static_cast<size_t>(i)];
        const int entry = links.entry[static_cast<size_t>(i)];
        const int exit = links.exit[static_cast<size_t>(i)];
        if (cl.members.size() > 16)
            throw std::logic_error("cluster exceeds the 16-member solver limit");
        if (cl.members.size() == 1) {
            paths[static_cast<size_t>(i)] = {cl.members.front()};
            return;
        }
        if (cl.members.size() == 2) {
            paths[static_cast<size_t>(i)] = {entry, exit};
            return;
        }
        Tour t = engine_solve(member_space, cl.members, Mode::open, entry, exit, opts,
                              derive_seed(stage_seed, static_cast<std::uint64_t>(i)));
        paths[static_cast<size_t>(i)] = std::move(t.order);
    });
    return paths;
}

Tour stitch(std::span<const int> cluster_order, std::span<const cluster::Cluster> clusters,
            std::span<const std::vector<int>> paths, const LinkAssignment& links,
            const Instance& member_space) {
    std::vector<int> order;
    size_t total = 0;
    for (const auto& c : clusters) total += c.members.size();
    order.reserve(total);
    for (int ci : cluster_order) {
        const auto& path = paths[static_cast<size_t>(ci)];
        if (path.empty()) throw std::runtime_error("empty path for cluster " + std::to_string(ci));
        if (path.front() != links.entry[static_cast<size_t>(ci)] ||
            path.back() != links.exit[static_cast<size_t>(ci)])
            throw std::runtime_error("path pins do not match links for cluster " +
                                     std::to_string(ci));
        order.insert(order.end(), path.begin(), path.end());
    }
    if (!is_permutation(order, member_space.n()))
        throw std::runtime_error("stitched tour is not a permutation of the level entities");
    Tour t;
    t.closed = true;
    t.cost = member_space.tour_length(order, true);
    t.order = std::move(order);
    return t;
}

Tour refine_segments(const Instance& space, Tour tour, int segment_len, int passes,
                     const SolveOptions& opts, std::uint64_t stage_seed) {
    const int n = static_cast<int>(tour.order.size());
    if (segment_len < 2) throw std::invalid_argument("segment length must be >= 2");
    if (n < 4 || passes <= 0) return tour;

    Rng offset_rng(derive_seed(stage_seed, kTagOffsets));
    for (int pass = 0; pass < passes; ++pass) {
        const int offset = static_cast<int>(offset_rng.index(static_cast<size_t>(segment_len)));
        const int chunk_count = (n + segment_len - 1) / segment_len;

        struct ChunkResult {
            int begin = 0, len = 0;
            std::vector<int> order;
            bool improved = false;
        };
        std::vector<ChunkResult> results(static_cast<size_t>(chunk_count));

        parallel_for(chunk_count, opts.workers, [&](int c) {
            auto& res = results[static_cast<size_t>(c)];
            res.begin = offset + c * segment_len;
            res.len = std::min(segment_len, n - c * segment_len);
            if (res.len < 4) return;
            std::vector<int> chunk(static_cast<size_t>(res.len));
            for (int k = 0; k < res.len; ++k)
                chunk[static_cast<size_t>(k)] =
                    tour.order[static_cast<size_t>((res.begin + k) % n)];
            const double before = space.tour_length(chunk, false);
            Tour t = engine_solve(space, chunk, Mode::open, chunk.front(), chunk.back(), opts,
                                  derive_seed(stage_seed, static_cast<std::uint64_t>(pass),
                                              static_cast<std::uint64_t>(c)));
            if (t.cost < before) {
                res.order = std::move(t.order);
                res.improved = true;
            }
        });

        for (const auto& res : results) {
            if (!res.improved) continue;
            for (int k = 0; k < res.len; ++k)
                tour.order[static_cast<size_t>((res.begin + k) % n)] =
                    res.order[static_cast<size_t>(k)];
        }
        tour.cost = space.tour_length(tour.order, true);
    }
    return tour;
}

std::vector<std::vector<int>> knn_lists(const Instance& space, int K) {
    const int n = space.n();
    const int k = std::min(K, n - 1);
    std::vector<std::vector<int>> lists(static_cast<size_t>(n));
    std::vector<std::pair<double, int>> cand(static_cast<size_t>(n - 1));
    for (int i = 0; i < n; ++i) {
        size_t w = 0;
        for (int j = 0; j < n; ++j)
            if (j != i) cand[w++] = {space.distance(i, j), j};
        std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
        auto& list = lists[static_cast<size_t>(i)];
        list.reserve(static_cast<size_t>(k));
        for (int t = 0; t < k; ++t) list.push_back(cand[static_cast<size_t>(t)].second);
    }
    return lists;
}

Tour two_opt_knn(const Instance& space, Tour tour, int K) {
    const int n = static_cast<int>(tour.order.size());
    if (K < 1) throw std::invalid_argument("neighbor count must be >= 1");
    if (n < 4) return tour;

    auto knn = knn_lists(space, K);
    auto& order = tour.order;
    std::vector<int> pos(static_cast<size_t>(space.n()), -1);
    for (int i = 0; i < n; ++i) pos[static_cast<size_t>(order[static_cast<size_t>(i)])] = i;

    bool improved = true;
    while (improved) {
        improved = false;
        for (int i = 0; i < n; ++i) {
            const int a = order[static_cast<size_t>(i)];
            const int b = order[static_cast<size_t>((i + 1) % n)];
            const double dab = space.distance(a, b);
            for (int c : knn[static_cast<size_t>(a)]) {
                if (c == b) continue;
                const int j = pos[static_cast<size_t>(c)];
                const int d = order[static_cast<size_t>((j + 1) % n)];
                if (d == a) continue;
                const double gain =
                    dab + space.distance(c, d) - space.distance(a, c) - space.distance(b, d);
                if (gain > kGainTol) {
                    int lo = std::min(i, j), hi = std::max(i, j);
                    std::reverse(order.begin() + lo + 1, order.begin() + hi + 1);
                    for (int t = lo + 1; t <= hi; ++t)
                        pos[static_cast<size_t>(order[static_cast<size_t>(t)])] = t;
                    improved = true;
                    break; // a's successor changed; rescan from the next anchor
                }
            }
        }
    }
    tour.cost = space.tour_length(order, true);
    return tour;
}

Tour hierarchical_solve(const Instance& inst, const SolveOptions& opts) {
    const int n = inst.n();
    if (n < 2) throw std::invalid_argument("solver needs n >= 2");

    std::vector<int> all(static_cast<size_t>(n));
    std::iota(all.begin(), all.end(), 0);

    if (n <= opts.max_cluster_size) {
        Tour t = engine_solve(inst, all, Mode::closed, 0, -1, opts,
                              derive_seed(opts.seed, kTagDirect));
        if (opts.enable_segment_refine)
            t = refine_segments(inst, std::move(t), opts.segment_len, opts.n_refine, opts,
                                derive_seed(opts.seed, kTagRefineDirect));
        if (opts.enable_two_opt) t = two_opt_knn(inst, std::move(t), opts.k_neighbors);
        return t;
    }

    Hierarchy h = build_hierarchy(inst, opts.max_cluster_size);
    const int L = h.top();

    // Distance space per level: the instance itself at level 0, REAL_EUC
    // over cluster centroids above it.
    std::vector<Instance> spaces;
    spaces.reserve(static_cast<size_t>(L));
    for (int l = 1; l <= L; ++l)
        spaces.push_back(centroid_space(h.levels[static_cast<size_t>(l - 1)],
                                        inst.name() + "_level" + std::to_string(l)));
    auto space_at = [&](int level) -> const Instance& {
        return level == 0 ? inst : spaces[static_cast<size_t>(level - 1)];
    };

    const Instance& top_space = space_at(L);
    std::vector<int> top_ids(static_cast<size_t>(top_space.n()));
    std::iota(top_ids.begin(), top_ids.end(), 0);
    Tour pi = engine_solve(top_space, top_ids, Mode::closed, 0, -1, opts,
                           derive_seed(opts.seed, kTagTopSolve));
    if (opts.enable_segment_refine)
        pi = refine_segments(top_space, std::move(pi), opts.segment_len, opts.n_refine, opts,
                             derive_seed(opts.seed, kTagRefine, static_cast<std::uint64_t>(L), 0xT));

    for (int l = L; l >= 1; --l) {
        const auto& clusters = h.levels[static_cast<size_t>(l - 1)];
        const Instance& member_space = space_at(l - 1);
        LinkAssignment links = fix_links(pi.order, clusters, member_space);
        auto paths = solve_level(clusters, links, member_space, opts,
                                 derive_seed(opts.seed, kTagLevelSolve,
                                             static_cast<std::uint64_t>(l)));
        pi = stitch(pi.order, clusters, paths, links, member_space);
        if (opts.enable_segment_refine)
            pi = refine_segments(member_space, std::move(pi), opts.segment_len, opts.n_refine,
                                 opts,
                                 derive_seed(opts.seed, kTagRefine,
                                             static_cast<std::uint64_t>(l - 1)));
        if (opts.enable_two_opt) pi = two_opt_knn(member_space, std::move(pi), opts.k_neighbors);
    }

    if (!is_permutation(pi.order, n))
        throw std::logic_error("final tour is not a permutation of the cities");
    pi.cost = inst.tour_length(pi.order, true);
    return pi;
}

} // namespace limo::hier
