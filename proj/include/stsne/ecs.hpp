#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stsne/geometry.hpp"
#include "stsne/point.hpp"

namespace stsne {

struct DecayParams {
    double alpha = 0.88;
    double beta = 1.6;
    double eta = 0.01;
};

/// N(t) = alpha * exp(-t * eta + beta).
double decay_threshold(double t, const DecayParams& params);

struct CutRecord {
    std::uint64_t polygon_id = 0;
    std::size_t section_id = 0;
    std::int64_t t = 0;
    bool operator==(const CutRecord&) const = default;
};

/// A cluster hull with its cobweb bookkeeping. polygon holds the current
/// (possibly cut) geometry; the partition keeps the birth subdivision that
/// hits and cuts are tracked against.
struct TrackedHull {
    std::uint64_t id = 0;
    int cluster_id = 0;
    ConvexPolygon polygon;
    CobwebPartition partition;
};

/// Stamp last_hit = t on the section containing each point, for every hull
/// whose polygon contains it.
void record_hits(std::vector<TrackedHull>& hulls, std::span<const LowDimPoint> points,
                 std::int64_t t);

struct EcsResult {
    std::vector<TrackedHull> surviving;
    std::vector<CutRecord> cuts;  // ordered by (polygon id, section id)
};

/// Cut every section starved longer than N(t). Fully starved outermost rings
/// cascade inward via ring cuts (running out of rings removes the polygon);
/// remaining starved sections trigger wedge cuts, with cyclically contiguous
/// starved wedges merged into one angular span. Cut sections have last_hit
/// reset to t.
EcsResult apply_ecs(std::vector<TrackedHull> hulls, std::int64_t t, const DecayParams& params);

}  // namespace stsne
