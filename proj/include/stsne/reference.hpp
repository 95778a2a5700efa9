#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stsne/clustering.hpp"
#include "stsne/geometry.hpp"
#include "stsne/matrix.hpp"
#include "stsne/pedrul.hpp"
#include "stsne/point.hpp"

namespace stsne::ref {

/// Serial, literal-loop counterparts of the parallel kernels. They exist as
/// independent checks for the test suite and as the comparison side of the
/// benchmark tool; keep them straightforward, not fast.

Matrix pairwise_sq_dists(const std::vector<HighDimPoint>& points);
Matrix joint_affinities(const std::vector<HighDimPoint>& points, double perplexity);
Matrix low_dim_affinities(std::span<const Vec2> ys);
double kl_divergence(const Matrix& p, const Matrix& q);
std::vector<Vec2> kl_gradient(const Matrix& p, std::span<const Vec2> ys);

/// Central finite differences of the KL objective, step h.
std::vector<Vec2> kl_gradient_fd(const Matrix& p, std::span<const Vec2> ys, double h);

/// O(n^3) hull: a directed edge (a, b) is on the hull iff every other point
/// lies strictly left of it.
std::optional<ConvexPolygon> convex_hull_bruteforce(std::span<const Vec2> points);

/// Scan every section cell, inclusive boundary test, lowest id wins.
std::optional<std::size_t> locate_bruteforce(const CobwebPartition& part, const Vec2& p);

std::vector<std::uint64_t> radius_neighbors_bruteforce(
    const std::vector<HighDimPoint>& points, const HighDimPoint& query, double r);

/// Quadratic-time greedy selection (sort by count, linear exclusion scan).
PedrulSelection select_pedrul_quadratic(const std::vector<HighDimPoint>& points, double r,
                                        std::size_t budget);

/// Classic queue-based DBSCAN with the same border rule.
ClusterLabels dbscan_quadratic(std::span<const LowDimPoint> ys, double eps,
                               std::size_t min_pts);

}  // namespace stsne::ref
