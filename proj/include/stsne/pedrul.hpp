#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "stsne/kdtree.hpp"
#include "stsne/point.hpp"

namespace stsne {

struct PedrulSelection {
    /// Chosen ids, ordered by descending neighbor count, ties by ascending id.
    std::vector<std::uint64_t> chosen;
    std::map<std::uint64_t, std::size_t> neighbor_counts;
    double radius = 0.0;
};

/// Greedy density-representative selection: candidates sorted by neighbor
/// count within R (descending, ties ascending id); a candidate is accepted
/// iff it lies strictly farther than R from every already-accepted point;
/// stops at the budget.
PedrulSelection select_pedrul(const std::vector<HighDimPoint>& points, double r,
                              std::size_t budget);

/// Scale-adaptive default radius: 0.25 x median pairwise distance over the
/// first min(1000, n) points. Throws ConfigError when the median is zero.
double auto_radius(const std::vector<HighDimPoint>& points);

}  // namespace stsne
