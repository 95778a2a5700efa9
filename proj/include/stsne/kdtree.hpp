#pragma once

#include <cstdint>
#include <vector>

#include "stsne/point.hpp"

namespace stsne {

/// Static kd-tree over high-dimensional points. Median split on the axis of
/// widest spread, leaves hold up to leaf_size points. Rebuilt per batch; no
/// dynamic updates.
class KdTree {
public:
    explicit KdTree(const std::vector<HighDimPoint>& points, std::size_t leaf_size = 16);

    /// Ids of all stored points with distance <= r from the query, excluding
    /// the query's own id. Sorted ascending.
    std::vector<std::uint64_t> radius_neighbors(const HighDimPoint& query, double r) const;

    std::size_t size() const { return ids_.size(); }
    std::size_t height() const { return height_; }

private:
    struct Node {
        std::size_t begin = 0;
        std::size_t end = 0;
        std::size_t axis = 0;
        double split = 0.0;
        std::int32_t left = -1;
        std::int32_t right = -1;
        bool leaf() const { return left < 0; }
    };

    std::int32_t build(std::size_t begin, std::size_t end, std::size_t depth);
    void query(std::int32_t node, const double* q, double r_sq, double r,
               std::uint64_t exclude_id, std::vector<std::uint64_t>& out) const;

    std::size_t dim_ = 0;
    std::size_t leaf_size_ = 16;
    std::size_t height_ = 0;
    std::vector<std::vector<double>> coords_;  // permuted storage
    std::vector<std::uint64_t> ids_;           // aligned with coords_
    std::vector<Node> nodes_;
    std::int32_t root_ = -1;
};

}  // namespace stsne
