#include "stsne/clustering.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "stsne/errors.hpp"

namespace stsne {

ClusterLabels cluster_embedding(std::span<const LowDimPoint> ys, double eps,
                                std::size_t min_pts) {
    if (eps <= 0.0) throw ConfigError("cluster_embedding: eps must be positive");
    if (min_pts < 1) throw ConfigError("cluster_embedding: min_pts must be >= 1");

    const std::size_t n = ys.size();
    ClusterLabels out;
    out.labels.assign(n, ClusterLabels::kNoise);
    if (n == 0) return out;

    const double eps_sq = eps * eps;
    std::vector<std::vector<std::size_t>> neighbors(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t j = 0; j < n; ++j)
            if (sq_norm(ys[i].pos - ys[j].pos) <= eps_sq) neighbors[i].push_back(j);
    }

    std::vector<bool> core(n, false);
    for (std::size_t i = 0; i < n; ++i) core[i] = neighbors[i].size() >= min_pts;

    // Clusters are connected components of core points, labeled in scan
    // order of their first core.
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!core[i] || out.labels[i] != ClusterLabels::kNoise) continue;
        const int label = next++;
        std::vector<std::size_t> stack{i};
        out.labels[i] = label;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v : neighbors[u]) {
                if (!core[v] || out.labels[v] != ClusterLabels::kNoise) continue;
                out.labels[v] = label;
                stack.push_back(v);
            }
        }
    }
    out.cluster_count = next;

    // Border points: nearest core within eps, ties by smallest source id.
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) continue;
        double best_d = std::numeric_limits<double>::infinity();
        std::uint64_t best_id = 0;
        int best_label = ClusterLabels::kNoise;
        for (std::size_t j : neighbors[i]) {
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

}  // namespace stsne
