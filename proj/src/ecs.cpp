#include "stsne/ecs.hpp"

#include <algorithm>
#include <cmath>

#include "stsne/errors.hpp"

namespace stsne {

double decay_threshold(double t, const DecayParams& params) {
    if (t < 0.0) throw ConfigError("decay_threshold: t must be >= 0");
    if (params.alpha <= 0.0) throw ConfigError("decay_threshold: alpha must be positive");
    return params.alpha * std::exp(-t * params.eta + params.beta);
}

void record_hits(std::vector<TrackedHull>& hulls, std::span<const LowDimPoint> points,
                 std::int64_t t) {
    for (auto& hull : hulls) {
        for (const auto& p : points) {
            const auto sid = locate(hull.partition, p.pos);
            if (sid) hull.partition.last_hit[*sid] = t;
        }
    }
}

namespace {

// Cyclically contiguous runs of wedge indices. Input sorted ascending.
std::vector<std::vector<std::size_t>> cyclic_runs(const std::vector<std::size_t>& wedges,
                                                  std::size_t wedge_count) {
    std::vector<std::vector<std::size_t>> runs;
    std::vector<bool> member(wedge_count, false);
    for (std::size_t w : wedges) member[w] = true;
    std::vector<bool> seen(wedge_count, false);
    for (std::size_t w : wedges) {
        if (seen[w]) continue;
        // Rewind to the start of this run.
        std::size_t start = w;
        while (member[(start + wedge_count - 1) % wedge_count] &&
               (start + wedge_count - 1) % wedge_count != w)
            start = (start + wedge_count - 1) % wedge_count;
        std::vector<std::size_t> run;
        std::size_t cur = start;
        while (member[cur] && !seen[cur]) {
            seen[cur] = true;
            run.push_back(cur);
            cur = (cur + 1) % wedge_count;
        }
        runs.push_back(std::move(run));
    }
    return runs;
}

}  // namespace

EcsResult apply_ecs(std::vector<TrackedHull> hulls, std::int64_t t, const DecayParams& params) {
    EcsResult result;
    const double threshold = decay_threshold(static_cast<double>(t), params);

    for (auto& hull : hulls) {
        auto& part = hull.partition;
        const std::size_t w_count = part.wedge_count();
        auto starved = [&](std::size_t w, std::size_t r) {
            return static_cast<double>(t - part.last_hit[part.section_id(w, r)]) > threshold;
        };
        auto log_cut = [&](std::size_t w, std::size_t r) {
            result.cuts.push_back({hull.id, part.section_id(w, r), t});
            part.last_hit[part.section_id(w, r)] = t;
        };

        bool removed = false;

        // Fully starved outermost rings cascade inward.
        while (part.active_rings >= 1) {
            const std::size_t r_out = part.active_rings - 1;
            bool all = true;
            for (std::size_t w = 0; w < w_count && all; ++w) all = starved(w, r_out);
            if (!all) break;
            for (std::size_t w = 0; w < w_count; ++w) log_cut(w, r_out);
            auto cut = cut_ring(hull.polygon, part.active_rings, part.active_rings);
            if (!cut) {
                removed = true;
                break;
            }
            hull.polygon = std::move(*cut);
            part.active_rings -= 1;
        }

        // Remaining starved sections are wedge cuts; contiguous starved
        // wedges merge into one span.
        if (!removed) {
            std::vector<std::size_t> starved_wedges;
            for (std::size_t w = 0; w < w_count; ++w) {
                for (std::size_t r = 0; r < part.active_rings; ++r) {
                    if (starved(w, r)) {
                        starved_wedges.push_back(w);
                        break;
                    }
                }
            }
            if (!starved_wedges.empty()) {
                // Log every starved cell up front; geometry may vanish below.
                for (std::size_t w : starved_wedges)
                    for (std::size_t r = 0; r < part.active_rings; ++r)
                        if (starved(w, r)) log_cut(w, r);

                if (starved_wedges.size() == w_count) {
                    removed = true;
                } else {
                    for (const auto& run : cyclic_runs(starved_wedges, w_count)) {
                        const double lo = part.vertex_angles[run.front()];
                        const double hi_raw =
                            part.vertex_angles[(run.back() + 1) % w_count];
                        const double span = std::fmod(hi_raw - lo + 4.0 * M_PI, 2.0 * M_PI);
                        auto cut = cut_wedge(hull.polygon, part.center, lo, lo + span);
                        if (!cut) {
                            removed = true;
                            break;
                        }
                        hull.polygon = std::move(*cut);
                    }
                }
            }
        }

        if (!removed) result.surviving.push_back(std::move(hull));
    }

    std::sort(result.cuts.begin(), result.cuts.end(), [](const CutRecord& a, const CutRecord& b) {
        if (a.polygon_id != b.polygon_id) return a.polygon_id < b.polygon_id;
        return a.section_id < b.section_id;
    });
    return result;
}

}  // namespace stsne
