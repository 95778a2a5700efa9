#include "stsne/pedrul.hpp"

#include <algorithm>
#include <cmath>

#include "stsne/errors.hpp"

namespace stsne {

PedrulSelection select_pedrul(const std::vector<HighDimPoint>& points, double r,
                              std::size_t budget) {
    if (budget < 1) throw ConfigError("select_pedrul: budget must be >= 1");
    if (r <= 0.0) throw ConfigError("select_pedrul: radius must be positive");
    PedrulSelection out;
    out.radius = r;
    if (points.empty()) return out;

    const KdTree tree(points);
    const std::size_t n = points.size();
    std::vector<std::size_t> counts(n, 0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        counts[i] = tree.radius_neighbors(points[i], r).size();
    }
    for (std::size_t i = 0; i < n; ++i) out.neighbor_counts[points[i].id] = counts[i];

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (counts[a] != counts[b]) return counts[a] > counts[b];
        return points[a].id < points[b].id;
    });

    const double r_sq = r * r;
    std::vector<std::size_t> accepted;
    for (std::size_t idx : order) {
        if (accepted.size() >= budget) break;
        bool clear = true;
        for (std::size_t acc : accepted) {
            double s = 0.0;
            const auto& a = points[idx].coords;
            const auto& b = points[acc].coords;
            for (std::size_t k = 0; k < a.size(); ++k) {
                const double d = a[k] - b[k];
                s += d * d;
                if (s > r_sq) break;
            }
            if (s <= r_sq) {
                clear = false;
                break;
            }
        }
        if (clear) {
            accepted.push_back(idx);
            out.chosen.push_back(points[idx].id);
        }
    }
    return out;
}

double auto_radius(const std::vector<HighDimPoint>& points) {
    const std::size_t n = std::min<std::size_t>(points.size(), 1000);
    if (n < 2) throw ConfigError("auto_radius: need at least 2 points");
    std::vector<double> dists;
    dists.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < points[i].coords.size(); ++k) {
                const double d = points[i].coords[k] - points[j].coords[k];
                s += d * d;
            }
            dists.push_back(std::sqrt(s));
        }
    const std::size_t mid = dists.size() / 2;
    std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid),
                     dists.end());
    const double median = dists[mid];
    if (median <= 0.0) throw ConfigError("auto_radius: zero median pairwise distance");
    return 0.25 * median;
}

}  // namespace stsne
