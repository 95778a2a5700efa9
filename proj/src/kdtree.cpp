#include "stsne/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "stsne/errors.hpp"

namespace stsne {

KdTree::KdTree(const std::vector<HighDimPoint>& points, std::size_t leaf_size)
    : leaf_size_(std::max<std::size_t>(1, leaf_size)) {
    if (points.empty()) throw ConfigError("KdTree: empty input");
    dim_ = points[0].coords.size();
    coords_.reserve(points.size());
    ids_.reserve(points.size());
    for (const auto& p : points) {
        if (p.coords.size() != dim_) throw ConfigError("KdTree: dimension mismatch");
        coords_.push_back(p.coords);
        ids_.push_back(p.id);
    }
    nodes_.reserve(2 * points.size() / leaf_size_ + 2);
    root_ = build(0, points.size(), 1);
}

std::int32_t KdTree::build(std::size_t begin, std::size_t end, std::size_t depth) {
    height_ = std::max(height_, depth);
    const auto idx = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({begin, end, 0, 0.0, -1, -1});
    if (end - begin <= leaf_size_) return idx;

    // Widest-spread axis over this span.
    std::size_t axis = 0;
    double best_spread = -1.0;
    for (std::size_t a = 0; a < dim_; ++a) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t i = begin; i < end; ++i) {
            lo = std::min(lo, coords_[i][a]);
            hi = std::max(hi, coords_[i][a]);
        }
        if (hi - lo > best_spread) {
            best_spread = hi - lo;
            axis = a;
        }
    }
    if (best_spread <= 0.0) return idx;  // all points identical: keep as leaf

    const std::size_t mid = begin + (end - begin) / 2;
    // Keep ids aligned while partitioning: permute an index array, then
    // apply the permutation to both parallel vectors.
    std::vector<std::size_t> order(end - begin);
    std::iota(order.begin(), order.end(), begin);
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(mid - begin),
                     order.end(), [&](std::size_t a, std::size_t b) {
                         if (coords_[a][axis] != coords_[b][axis])
                             return coords_[a][axis] < coords_[b][axis];
                         return ids_[a] < ids_[b];
                     });
    std::vector<std::vector<double>> tmp_coords(end - begin);
    std::vector<std::uint64_t> tmp_ids(end - begin);
    for (std::size_t i = 0; i < order.size(); ++i) {
        tmp_coords[i] = std::move(coords_[order[i]]);
        tmp_ids[i] = ids_[order[i]];
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
        coords_[begin + i] = std::move(tmp_coords[i]);
        ids_[begin + i] = tmp_ids[i];
    }

    nodes_[idx].axis = axis;
    nodes_[idx].split = coords_[mid][axis];
    const std::int32_t left = build(begin, mid, depth + 1);
    const std::int32_t right = build(mid, end, depth + 1);
    nodes_[idx].left = left;
    nodes_[idx].right = right;
    return idx;
}

void KdTree::query(std::int32_t node, const double* q, double r_sq, double r,
                   std::uint64_t exclude_id, std::vector<std::uint64_t>& out) const {
    const Node& nd = nodes_[static_cast<std::size_t>(node)];
    if (nd.leaf()) {
        for (std::size_t i = nd.begin; i < nd.end; ++i) {
            if (ids_[i] == exclude_id) continue;
            double s = 0.0;
            for (std::size_t a = 0; a < dim_; ++a) {
                const double d = coords_[i][a] - q[a];
                s += d * d;
                if (s > r_sq) break;
            }
            if (s <= r_sq) out.push_back(ids_[i]);
        }
        return;
    }
    const double delta = q[nd.axis] - nd.split;
    // Points equal to the split live in the right child; the left child may
    // still contain equal coordinates, so prune only by distance.
    if (delta <= r) query(nd.left, q, r_sq, r, exclude_id, out);
    if (delta >= -r) query(nd.right, q, r_sq, r, exclude_id, out);
}

std::vector<std::uint64_t> KdTree::radius_neighbors(const HighDimPoint& query_pt,
                                                    double r) const {
    if (r <= 0.0) throw ConfigError("radius_neighbors: radius must be positive");
    if (query_pt.coords.size() != dim_)
        throw ConfigError("radius_neighbors: dimension mismatch");
    std::vector<std::uint64_t> out;
    query(root_, query_pt.coords.data(), r * r, r, query_pt.id, out);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace stsne
