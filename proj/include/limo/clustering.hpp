#pragma once

#include <span>
#include <vector>

#include "limo/instance.hpp"

namespace limo::cluster {

/// A group of entity ids with the arithmetic mean of their coordinates.
struct Cluster {
    std::vector<int> members;
    Point centroid;
};

/// 2x2 symmetric covariance.
struct Cov2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;
};

/// Componentwise mean and unbiased covariance (1/(n-1)); needs >= 2 points.
std::pair<Point, Cov2> mean_and_cov(std::span<const Point> points);

/// Unit eigenvector of the larger eigenvalue, closed form. Sign fixed so the
/// first nonzero component is positive; (1,0) for the zero matrix and for
/// equal eigenvalues.
Point dominant_eigenvector(const Cov2& cov);

/// Cut index k* in [1, n) maximizing the between-cluster variance
/// k*(mean_left - mean)^2 + (n-k)*(mean_right - mean)^2 over the sorted
/// projections; ties resolve to the smallest k.
int otsu_cut(std::span<const double> sorted_projections);

Point centroid_of(std::span<const int> members, std::span<const Point> coords);

/// Split a cluster along its principal axis at the Otsu cut. Projection ties
/// sort by entity id. Both sides are non-empty.
std::pair<Cluster, Cluster> pca_bisect(const Cluster& cluster, std::span<const Point> coords);

/// Recursive bisection until every leaf has at most M members. Leaves
/// partition the input and are ordered by their smallest member id.
std::vector<Cluster> build_clusters(std::span<const int> entity_ids, std::span<const Point> coords,
                                    int M);
std::vector<Cluster> build_clusters(std::span<const Point> points, int M);

/// Full bisection tree for inspection; node 0 is the root, parent == -1.
struct DendrogramNode {
    int id = 0;
    int parent = -1;
    bool leaf = false;
    std::vector<int> members;
    Point centroid;
};
std::vector<DendrogramNode> build_dendrogram(std::span<const Point> points, int M);

} // namespace limo::cluster
