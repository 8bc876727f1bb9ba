#include "limo/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace limo::cluster {

std::pair<Point, Cov2> mean_and_cov(std::span<const Point> points) {
    const auto n = points.size();
    if (n < 2) throw std::invalid_argument("covariance needs >= 2 points");
    Point mu{0.0, 0.0};
    for (const auto& p : points) {
        mu.x += p.x;
        mu.y += p.y;
    }
    mu.x /= static_cast<double>(n);
    mu.y /= static_cast<double>(n);
    Cov2 cov;
    for (const auto& p : points) {
        double dx = p.x - mu.x, dy = p.y - mu.y;
        cov.xx += dx * dx;
        cov.xy += dx * dy;
        cov.yy += dy * dy;
    }
    double denom = static_cast<double>(n - 1);
    cov.xx /= denom;
    cov.xy /= denom;
    cov.yy /= denom;
    return {mu, cov};
}

Point dominant_eigenvector(const Cov2& cov) {
    // Eigenvalues (a+c)/2 +- sqrt(((a-c)/2)^2 + b^2); disc == 0 means the
    // matrix is a multiple of the identity (declared convention: (1,0)).
    const double half_diff = 0.5 * (cov.xx - cov.yy);
    const double disc = std::sqrt(half_diff * half_diff + cov.xy * cov.xy);
    if (disc == 0.0) return {1.0, 0.0};
    const double lambda = 0.5 * (cov.xx + cov.yy) + disc;
    // (A - lambda I) v = 0; pick the better-conditioned row.
    double vx, vy;
    if (std::abs(cov.xy) > 0.0) {
        if (std::abs(lambda - cov.xx) >= std::abs(lambda - cov.yy)) {
            vx = cov.xy;
            vy = lambda - cov.xx;
        } else {
            vx = lambda - cov.yy;
            vy = cov.xy;
        }
    } else {
        return cov.xx >= cov.yy ? Point{1.0, 0.0} : Point{0.0, 1.0};
    }
    double norm = std::hypot(vx, vy);
    vx /= norm;
    vy /= norm;
    if (vx < 0.0 || (vx == 0.0 && vy < 0.0)) {
        vx = -vx;
        vy = -vy;
    }
    return {vx, vy};
}

int otsu_cut(std::span<const double> s) {
    const auto n = s.size();
    if (n < 2) throw std::invalid_argument("cut needs >= 2 projections");
    double total = std::accumulate(s.begin(), s.end(), 0.0);
    const double mean = total / static_cast<double>(n);
    double left = 0.0;
    double best_vb = -1.0;
    int best_k = 1;
    for (size_t k = 1; k < n; ++k) {
        left += s[k - 1];
        double m1 = left / static_cast<double>(k);
        double m2 = (total - left) / static_cast<double>(n - k);
        double vb = static_cast<double>(k) * (m1 - mean) * (m1 - mean) +
                    static_cast<double>(n - k) * (m2 - mean) * (m2 - mean);
        if (vb > best_vb) {
            best_vb = vb;
            best_k = static_cast<int>(k);
        }
    }
    return best_k;
}

Point centroid_of(std::span<const int> members, std::span<const Point> coords) {
    Point c{0.0, 0.0};
    for (int id : members) {
        c.x += coords[static_cast<size_t>(id)].x;
        c.y += coords[static_cast<size_t>(id)].y;
    }
    c.x /= static_cast<double>(members.size());
    c.y /= static_cast<double>(members.size());
    return c;
}

std::pair<Cluster, Cluster> pca_bisect(const Cluster& cluster, std::span<const Point> coords) {
    const auto& members = cluster.members;
    if (members.size() < 2) throw std::invalid_argument("cannot bisect a singleton");

    std::vector<Point> pts;
    pts.reserve(members.size());
    for (int id : members) pts.push_back(coords[static_cast<size_t>(id)]);
    auto [mu, cov] = mean_and_cov(pts);
    (void)mu;
    Point v = dominant_eigenvector(cov);

    std::vector<std::pair<double, int>> proj;
    proj.reserve(members.size());
    for (int id : members) {
        const Point& p = coords[static_cast<size_t>(id)];
        proj.emplace_back(v.x * p.x + v.y * p.y, id);
    }
    std::sort(proj.begin(), proj.end());

    std::vector<double> s;
    s.reserve(proj.size());
    for (auto& [val, id] : proj) s.push_back(val);
    int k = otsu_cut(s);

    Cluster left, right;
    for (int i = 0; i < k; ++i) left.members.push_back(proj[static_cast<size_t>(i)].second);
    for (size_t i = static_cast<size_t>(k); i < proj.size(); ++i)
        right.members.push_back(proj[i].second);
    left.centroid = centroid_of(left.members, coords);
    right.centroid = centroid_of(right.members, coords);
    return {std::move(left), std::move(right)};
}

namespace {

void bisect_rec(Cluster node, std::span<const Point> coords, int M, std::vector<Cluster>& leaves,
                std::vector<DendrogramNode>* dendro, int node_id) {
    if (static_cast<int>(node.members.size()) <= M) {
        if (dendro) (*dendro)[static_cast<size_t>(node_id)].leaf = true;
        leaves.push_back(std::move(node));
        return;
    }
    auto [left, right] = pca_bisect(node, coords);
    int left_id = -1, right_id = -1;
    if (dendro) {
        left_id = static_cast<int>(dendro->size());
        dendro->push_back({left_id, node_id, false, left.members, left.centroid});
        right_id = static_cast<int>(dendro->size());
        dendro->push_back({right_id, node_id, false, right.members, right.centroid});
    }
    bisect_rec(std::move(left), coords, M, leaves, dendro, left_id);
    bisect_rec(std::move(right), coords, M, leaves, dendro, right_id);
}

std::vector<Cluster> build_impl(std::span<const int> entity_ids, std::span<const Point> coords,
                                int M, std::vector<DendrogramNode>* dendro) {
    if (M < 1) throw std::invalid_argument("max cluster size must be >= 1");
    if (entity_ids.empty()) return {};
    Cluster root;
    root.members.assign(entity_ids.begin(), entity_ids.end());
    root.centroid = centroid_of(root.members, coords);
    if (dendro) dendro->push_back({0, -1, false, root.members, root.centroid});

    std::vector<Cluster> leaves;
    bisect_rec(std::move(root), coords, M, leaves, dendro, 0);
    std::sort(leaves.begin(), leaves.end(), [](const Cluster& a, const Cluster& b) {
        return *std::min_element(a.members.begin(), a.members.end()) <
               *std::min_element(b.members.begin(), b.members.end());
    });
    return leaves;
}

} // namespace

std::vector<Cluster> build_clusters(std::span<const int> entity_ids, std::span<const Point> coords,
                                    int M) {
    return build_impl(entity_ids, coords, M, nullptr);
}

std::vector<Cluster> build_clusters(std::span<const Point> points, int M) {
    std::vector<int> ids(points.size());
    std::iota(ids.begin(), ids.end(), 0);
    return build_impl(ids, points, M, nullptr);
}

std::vector<DendrogramNode> build_dendrogram(std::span<const Point> points, int M) {
    std::vector<int> ids(points.size());
    std::iota(ids.begin(), ids.end(), 0);
    std::vector<DendrogramNode> dendro;
    build_impl(ids, points, M, &dendro);
    return dendro;
}

} // namespace limo::cluster
