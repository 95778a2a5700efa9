#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stsne/point.hpp"

namespace stsne {

/// Counter-clockwise, strictly convex (no three consecutive collinear
/// vertices), at least 3 vertices.
struct ConvexPolygon {
    std::vector<Vec2> vertices;
};

/// Monotone-chain hull with collinear points dropped. Returns nullopt for
/// degenerate input (< 3 effective points or all collinear).
std::optional<ConvexPolygon> convex_hull(std::span<const Vec2> points);

double polygon_area(const ConvexPolygon& poly);
Vec2 polygon_centroid(const ConvexPolygon& poly);
bool is_strictly_convex_ccw(const ConvexPolygon& poly);

/// Inclusive point-in-convex-polygon test (boundary counts as inside).
bool contains(const ConvexPolygon& poly, const Vec2& p);

/// Same test over a raw CCW convex vertex loop. Shared by locate and the
/// brute-force oracle so both resolve boundaries identically.
bool point_in_convex_ccw(std::span<const Vec2> corners, const Vec2& p);

/// Wedge-by-vertex-fan x concentric-ring subdivision of a polygon.
/// Section ids are wedge-major with the innermost ring first:
///   section_id = wedge * ring_count + ring,   ring 0 innermost.
/// Ring boundaries are the polygon scaled about its area centroid by
/// (ring+1)/ring_count; the outermost boundary is the polygon itself.
struct CobwebPartition {
    Vec2 center;
    std::size_t rings = 1;
    /// Vertices of the polygon at partition build time; wedge w spans
    /// birth_vertices[w] -> birth_vertices[w+1] (cyclic).
    std::vector<Vec2> birth_vertices;
    /// Angle of each birth vertex about the center, in [0, 2*pi).
    std::vector<double> vertex_angles;
    /// last_hit per section, indexed by section_id.
    std::vector<std::int64_t> last_hit;
    /// Rings still present (ring cuts shrink this from `rings` downward).
    std::size_t active_rings = 1;
    std::int64_t born_at = 0;
    /// vertex_angles rotated to start at the smallest angle (for the wedge
    /// binary search); rotation offset in `rot`.
    std::vector<double> sorted_angles;
    std::size_t rot = 0;

    std::size_t wedge_count() const { return birth_vertices.size(); }
    std::size_t section_count() const { return birth_vertices.size() * rings; }
    std::size_t section_id(std::size_t wedge, std::size_t ring) const {
        return wedge * rings + ring;
    }
};

CobwebPartition build_cobweb(const ConvexPolygon& poly, std::size_t rings,
                             std::int64_t born_at);

/// The four corners of a section cell (three for ring 0), CCW.
std::vector<Vec2> section_corners(const CobwebPartition& part, std::size_t wedge,
                                  std::size_t ring);

/// Section containing p, or nullopt when p is outside the polygon. Boundary
/// points resolve to the lowest incident section_id. Wedge lookup is a
/// binary search on vertex angles; a brute scan backs up the edge cases.
std::optional<std::size_t> locate(const CobwebPartition& part, const Vec2& p);

/// Removes the part of the polygon inside the open angular span
/// (angle_lo, angle_hi) about `center` (measured CCW from angle_lo; a span
/// >= 2*pi removes everything). Vertices strictly inside the span are
/// dropped and the two ray-boundary intersections inserted, so every
/// remaining vertex lies on the original boundary and the result stays
/// convex. Returns nullopt when fewer than 3 vertices remain.
std::optional<ConvexPolygon> cut_wedge(const ConvexPolygon& poly, const Vec2& center,
                                       double angle_lo, double angle_hi);

/// Removes the outermost ring: the polygon scaled about its centroid by
/// (ring_count-1)/ring_count. ring_index is 1-based; only
/// ring_index == ring_count is removable (ContractError otherwise).
/// ring_count == 1 removes the polygon entirely (nullopt).
std::optional<ConvexPolygon> cut_ring(const ConvexPolygon& poly, std::size_t ring_index,
                                      std::size_t ring_count);

}  // namespace stsne
