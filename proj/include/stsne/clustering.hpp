#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stsne/point.hpp"

namespace stsne {

struct ClusterLabels {
    static constexpr int kNoise = -1;
    std::vector<int> labels;  // index-aligned with the input
    int cluster_count = 0;
};

/// DBSCAN over 2-D embedded points. Neighborhoods are closed balls and
/// include the point itself; cores have >= min_pts neighbors; clusters are
/// connected components of cores, labeled by scan order. Border points join
/// the nearest core's cluster (ties by smallest source_id), which keeps the
/// partition stable under input permutation.
ClusterLabels cluster_embedding(std::span<const LowDimPoint> ys, double eps,
                                std::size_t min_pts);

}  // namespace stsne
