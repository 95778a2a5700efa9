#include "stsne/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "stsne/errors.hpp"
#include "stsne/tsne.hpp"

namespace stsne::ref {

Matrix pairwise_sq_dists(const std::vector<HighDimPoint>& points) {
    const std::size_t n = points.size();
    Matrix out(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < points[i].coords.size(); ++k) {
                const double d = points[i].coords[k] - points[j].coords[k];
                s += d * d;
            }
            out(i, j) = s;
        }
    return out;
}

Matrix joint_affinities(const std::vector<HighDimPoint>& points, double perplexity) {
    const std::size_t n = points.size();
    const Matrix d2 = ref::pairwise_sq_dists(points);
    Matrix cond(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto cal = calibrate_row(std::span<const double>(d2.row(i), n), perplexity, i);
        for (std::size_t j = 0; j < n; ++j) cond(i, j) = cal.probs[j];
    }
    Matrix p(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) p(i, j) = (cond(i, j) + cond(j, i)) / (2.0 * static_cast<double>(n));
    return p;
}

Matrix low_dim_affinities(std::span<const Vec2> ys) {
    const std::size_t n = ys.size();
    Matrix q(n, n, 0.0);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double w = 1.0 / (1.0 + sq_norm(ys[i] - ys[j]));
            q(i, j) = w;
            z += w;
        }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) q(i, j) /= z;
    return q;
}

double kl_divergence(const Matrix& p, const Matrix& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.rows(); ++i)
        for (std::size_t j = 0; j < p.cols(); ++j) {
            const double pij = p(i, j);
            if (pij <= 0.0) continue;
            s += pij * std::log(pij / std::max(q(i, j), 1e-12));
        }
    return s;
}

std::vector<Vec2> kl_gradient(const Matrix& p, std::span<const Vec2> ys) {
    const std::size_t n = ys.size();
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) z += 1.0 / (1.0 + sq_norm(ys[i] - ys[j]));
    std::vector<Vec2> grad(n, Vec2{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const Vec2 diff = ys[i] - ys[j];
            const double w = 1.0 / (1.0 + sq_norm(diff));
            const double mult = 4.0 * (p(i, j) - w / z) * w;
            grad[i].x += mult * diff.x;
            grad[i].y += mult * diff.y;
        }
    return grad;
}

std::vector<Vec2> kl_gradient_fd(const Matrix& p, std::span<const Vec2> ys, double h) {
    std::vector<Vec2> mutable_ys(ys.begin(), ys.end());
    std::vector<Vec2> grad(ys.size());
    auto objective = [&]() {
        return ref::kl_divergence(p, ref::low_dim_affinities(mutable_ys));
    };
    for (std::size_t i = 0; i < ys.size(); ++i) {
        for (int axis = 0; axis < 2; ++axis) {
            double& coord = axis == 0 ? mutable_ys[i].x : mutable_ys[i].y;
            const double orig = coord;
            coord = orig + h;
            const double up = objective();
            coord = orig - h;
            const double down = objective();
            coord = orig;
            const double d = (up - down) / (2.0 * h);
            (axis == 0 ? grad[i].x : grad[i].y) = d;
        }
    }
    return grad;
}

std::optional<ConvexPolygon> convex_hull_bruteforce(std::span<const Vec2> points) {
    std::vector<Vec2> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        if (a.x != b.x) return a.x < b.x;
        return a.y < b.y;
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n < 3) return std::nullopt;

    // Collect directed hull edges, then chain them.
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            bool all_left = true;
            for (std::size_t c = 0; c < n && all_left; ++c) {
                if (c == a || c == b) continue;
                const double cr = (pts[b].x - pts[a].x) * (pts[c].y - pts[a].y) -
                                  (pts[b].y - pts[a].y) * (pts[c].x - pts[a].x);
                if (cr <= 0.0) all_left = false;
            }
            if (all_left) edges.emplace_back(a, b);
        }
    if (edges.size() < 3) return std::nullopt;

    std::vector<std::size_t> next(n, SIZE_MAX);
    for (const auto& [a, b] : edges) next[a] = b;
    std::vector<Vec2> loop;
    std::size_t start = edges.front().first;
    std::size_t cur = start;
    do {
        loop.push_back(pts[cur]);
        cur = next[cur];
        if (cur == SIZE_MAX || loop.size() > n) return std::nullopt;
    } while (cur != start);
    if (loop.size() < 3) return std::nullopt;
    return ConvexPolygon{std::move(loop)};
}

std::optional<std::size_t> locate_bruteforce(const CobwebPartition& part, const Vec2& p) {
    std::optional<std::size_t> best;
    for (std::size_t w = 0; w < part.wedge_count(); ++w)
        for (std::size_t r = 0; r < part.rings; ++r) {
            const auto cell = section_corners(part, w, r);
            if (point_in_convex_ccw(cell, p)) {
                const std::size_t id = part.section_id(w, r);
                if (!best || id < *best) best = id;
            }
        }
    return best;
}

std::vector<std::uint64_t> radius_neighbors_bruteforce(
    const std::vector<HighDimPoint>& points, const HighDimPoint& query, double r) {
    std::vector<std::uint64_t> out;
    const double r_sq = r * r;
    for (const auto& p : points) {
        if (p.id == query.id) continue;
        double s = 0.0;
        for (std::size_t k = 0; k < p.coords.size(); ++k) {
            const double d = p.coords[k] - query.coords[k];
            s += d * d;
        }
        if (s <= r_sq) out.push_back(p.id);
    }
    std::sort(out.begin(), out.end());
    return out;
}

PedrulSelection select_pedrul_quadratic(const std::vector<HighDimPoint>& points, double r,
                                        std::size_t budget) {
    if (budget < 1) throw ConfigError("select_pedrul_quadratic: budget must be >= 1");
    if (r <= 0.0) throw ConfigError("select_pedrul_quadratic: radius must be positive");
    PedrulSelection out;
    out.radius = r;
    const std::size_t n = points.size();
    const double r_sq = r * r;
    auto d_sq = [&](std::size_t a, std::size_t b) {
        double s = 0.0;
        for (std::size_t k = 0; k < points[a].coords.size(); ++k) {
            const double d = points[a].coords[k] - points[b].coords[k];
            s += d * d;
        }
        return s;
    };
    std::vector<std::size_t> counts(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            if (j != i && d_sq(i, j) <= r_sq) ++counts[i];
        out.neighbor_counts[points[i].id] = counts[i];
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (counts[a] != counts[b]) return counts[a] > counts[b];
        return points[a].id < points[b].id;
    });
    std::vector<std::size_t> accepted;
    for (std::size_t idx : order) {
        if (accepted.size() >= budget) break;
        bool clear = true;
        for (std::size_t acc : accepted)
            if (d_sq(idx, acc) <= r_sq) {
                clear = false;
                break;
            }
        if (clear) {
            accepted.push_back(idx);
            out.chosen.push_back(points[idx].id);
        }
    }
    return out;
}

ClusterLabels dbscan_quadratic(std::span<const LowDimPoint> ys, double eps,
                               std::size_t min_pts) {
    const std::size_t n = ys.size();
    ClusterLabels out;
    out.labels.assign(n, ClusterLabels::kNoise);
    const double eps_sq = eps * eps;
    auto neigh = [&](std::size_t i) {
        std::vector<std::size_t> r;
        for (std::size_t j = 0; j < n; ++j)
            if (sq_norm(ys[i].pos - ys[j].pos) <= eps_sq) r.push_back(j);
        return r;
    };
    std::vector<bool> core(n, false);
    for (std::size_t i = 0; i < n; ++i) core[i] = neigh(i).size() >= min_pts;

    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!core[i] || out.labels[i] != ClusterLabels::kNoise) continue;
        const int label = next++;
        std::queue<std::size_t> q;
        q.push(i);
        out.labels[i] = label;
        while (!q.empty()) {
            const std::size_t u = q.front();
            q.pop();
            for (std::size_t v : neigh(u)) {
                if (!core[v] || out.labels[v] != ClusterLabels::kNoise) continue;
                out.labels[v] = label;
                q.push(v);
            }
        }
    }
    out.cluster_count = next;
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) continue;
        double best_d = std::numeric_limits<double>::infinity();
        std::uint64_t best_id = 0;
        int best_label = ClusterLabels::kNoise;
        for (std::size_t j : neigh(i)) {
            if (!core[j]) continue;
            const double d = sq_norm(ys[i].pos - ys[j].pos);
            if (d < best_d || (d == best_d && ys[j].source_id < best_id)) {
                best_d = d;
                best_id = ys[j].source_id;
                best_label = out.labels[j];
            }
        }
        out.labels[i] = best_label;
    }
    return out;
}

}  // namespace stsne::ref
