#include "stsne/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stsne/errors.hpp"

namespace stsne {
namespace {

constexpr double kEps = 1e-9;
constexpr double kTwoPi = 2.0 * M_PI;

double norm_angle(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    return r;
}

// CCW angular offset of theta from lo, in [0, 2*pi).
double angular_pos(double theta, double lo) { return norm_angle(theta - lo); }

double cross3(const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

std::optional<ConvexPolygon> convex_hull(std::span<const Vec2> points) {
    std::vector<Vec2> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        if (a.x != b.x) return a.x < b.x;
        return a.y < b.y;
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n < 3) return std::nullopt;

    std::vector<Vec2> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross3(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower_end = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower_end && cross3(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    if (hull.size() < 3) return std::nullopt;
    return ConvexPolygon{std::move(hull)};
}

double polygon_area(const ConvexPolygon& poly) {
    const auto& v = poly.vertices;
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % v.size()];
        s += a.x * b.y - b.x * a.y;
    }
    return 0.5 * s;
}

Vec2 polygon_centroid(const ConvexPolygon& poly) {
    const auto& v = poly.vertices;
    double a6 = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2& p = v[i];
        const Vec2& q = v[(i + 1) % v.size()];
        const double w = p.x * q.y - q.x * p.y;
        a6 += w;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    return {cx / (3.0 * a6), cy / (3.0 * a6)};
}

bool is_strictly_convex_ccw(const ConvexPolygon& poly) {
    const auto& v = poly.vertices;
    if (v.size() < 3) return false;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % v.size()];
        const Vec2& c = v[(i + 2) % v.size()];
        if (cross3(a, b, c) <= 0.0) return false;
    }
    return true;
}

bool point_in_convex_ccw(std::span<const Vec2> corners, const Vec2& p) {
    for (std::size_t i = 0; i < corners.size(); ++i) {
        const Vec2& a = corners[i];
        const Vec2& b = corners[(i + 1) % corners.size()];
        if (cross3(a, b, p) < -kEps) return false;
    }
    return true;
}

bool contains(const ConvexPolygon& poly, const Vec2& p) {
    return point_in_convex_ccw(poly.vertices, p);
}

CobwebPartition build_cobweb(const ConvexPolygon& poly, std::size_t rings,
                             std::int64_t born_at) {
    if (rings < 1) throw ConfigError("build_cobweb: ring count must be >= 1");
    if (!is_strictly_convex_ccw(poly)) throw ContractError("build_cobweb: invalid polygon");

    CobwebPartition part;
    part.center = polygon_centroid(poly);
    part.rings = rings;
    part.active_rings = rings;
    part.born_at = born_at;
    part.birth_vertices = poly.vertices;
    part.vertex_angles.reserve(poly.vertices.size());
    for (const Vec2& v : poly.vertices)
        part.vertex_angles.push_back(norm_angle(std::atan2(v.y - part.center.y,
                                                           v.x - part.center.x)));
    part.last_hit.assign(poly.vertices.size() * rings, born_at);

    part.rot = 0;
    for (std::size_t i = 1; i < part.vertex_angles.size(); ++i)
        if (part.vertex_angles[i] < part.vertex_angles[part.rot]) part.rot = i;
    part.sorted_angles.resize(part.vertex_angles.size());
    for (std::size_t i = 0; i < part.vertex_angles.size(); ++i)
        part.sorted_angles[i] = part.vertex_angles[(part.rot + i) % part.vertex_angles.size()];
    return part;
}

std::vector<Vec2> section_corners(const CobwebPartition& part, std::size_t wedge,
                                  std::size_t ring) {
    const std::size_t w = part.wedge_count();
    const Vec2& c = part.center;
    const Vec2 v0 = part.birth_vertices[wedge];
    const Vec2 v1 = part.birth_vertices[(wedge + 1) % w];
    const double m = static_cast<double>(part.rings);
    const double s_out = static_cast<double>(ring + 1) / m;
    if (ring == 0) {
        return {c, c + (v0 - c) * s_out, c + (v1 - c) * s_out};
    }
    const double s_in = static_cast<double>(ring) / m;
    return {c + (v0 - c) * s_in, c + (v0 - c) * s_out, c + (v1 - c) * s_out,
            c + (v1 - c) * s_in};
}

std::optional<std::size_t> locate(const CobwebPartition& part, const Vec2& p) {
    ConvexPolygon birth{part.birth_vertices};
    if (!contains(birth, p)) return std::nullopt;

    const std::size_t w_count = part.wedge_count();
    const std::size_t m = part.rings;

    // Near the center every innermost cell is incident; the lowest matching
    // id wins, mirroring the brute-force rule.
    if (sq_norm(p - part.center) <= 1e-16) {
        for (std::size_t w = 0; w < w_count; ++w) {
            const auto cell = section_corners(part, w, 0);
            if (point_in_convex_ccw(cell, p)) return part.section_id(w, 0);
        }
    }

    const double theta = norm_angle(std::atan2(p.y - part.center.y, p.x - part.center.x));
    auto it = std::upper_bound(part.sorted_angles.begin(), part.sorted_angles.end(), theta);
    std::size_t pos = it == part.sorted_angles.begin()
                          ? part.sorted_angles.size() - 1
                          : static_cast<std::size_t>(it - part.sorted_angles.begin()) - 1;
    const std::size_t w_mid = (part.rot + pos) % w_count;

    std::optional<std::size_t> best;
    for (std::size_t dw = 0; dw < 3; ++dw) {
        const std::size_t w = (w_mid + w_count - 1 + dw) % w_count;
        for (std::size_t r = 0; r < m; ++r) {
            const auto cell = section_corners(part, w, r);
            if (point_in_convex_ccw(cell, p)) {
                const std::size_t id = part.section_id(w, r);
                if (!best || id < *best) best = id;
            }
        }
    }
    if (best) return best;

    // Numeric edge: fall back to a full scan.
    for (std::size_t w = 0; w < w_count; ++w)
        for (std::size_t r = 0; r < m; ++r) {
            const auto cell = section_corners(part, w, r);
            if (point_in_convex_ccw(cell, p)) return part.section_id(w, r);
        }
    return std::nullopt;
}

namespace {

// Single intersection of the ray from an interior point with the boundary.
Vec2 ray_boundary_intersection(const ConvexPolygon& poly, const Vec2& c, double angle) {
    const Vec2 dir{std::cos(angle), std::sin(angle)};
    const auto& v = poly.vertices;
    double best_t = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2& a = v[i];
        const Vec2& b = v[(i + 1) % v.size()];
        const Vec2 e = b - a;
        const double denom = cross(dir, e);
        if (std::abs(denom) < 1e-15) continue;
        const Vec2 ac = a - c;
        const double t = cross(ac, e) / denom;
        const double s = cross(ac, dir) / denom;
        if (t > 0.0 && s >= -1e-9 && s <= 1.0 + 1e-9) best_t = std::min(best_t, t);
    }
    return c + dir * best_t;
}

// Drop consecutive duplicates and collinear middles until stable.
void clean_loop(std::vector<Vec2>& v) {
    bool changed = true;
    while (changed && v.size() >= 3) {
        changed = false;
        for (std::size_t i = 0; i < v.size();) {
            const Vec2& a = v[(i + v.size() - 1) % v.size()];
            const Vec2& b = v[i];
            if (sq_norm(b - a) <= 1e-18) {
                v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                continue;
            }
            ++i;
        }
        if (v.size() < 3) return;
        for (std::size_t i = 0; i < v.size();) {
            const Vec2& a = v[(i + v.size() - 1) % v.size()];
            const Vec2& b = v[i];
            const Vec2& c = v[(i + 1) % v.size()];
            const double cr = cross3(a, b, c);
            const double scale = std::sqrt(sq_norm(b - a) * sq_norm(c - b));
            if (cr <= 1e-12 * std::max(scale, 1e-30)) {
                v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                continue;
            }
            ++i;
        }
    }
}

}  // namespace

std::optional<ConvexPolygon> cut_wedge(const ConvexPolygon& poly, const Vec2& center,
                                       double angle_lo, double angle_hi) {
    const double span = angle_hi - angle_lo;
    if (span <= 0.0) throw ConfigError("cut_wedge: empty angular span");
    if (span >= kTwoPi - 1e-12) return std::nullopt;

    // A cut is only well defined from an interior viewpoint. A center pushed
    // outside by earlier cuts means the polygon is mostly consumed already.
    if (!contains(poly, center)) return std::nullopt;

    const double lo = norm_angle(angle_lo);
    const Vec2 q_lo = ray_boundary_intersection(poly, center, angle_lo);
    const Vec2 q_hi = ray_boundary_intersection(poly, center, angle_hi);

    // Vertices kept: those not strictly inside the open span, ordered CCW
    // starting from the span's high end.
    struct Keyed {
        double key;
        Vec2 v;
    };
    std::vector<Keyed> kept;
    kept.push_back({0.0, q_hi});
    const double hi_norm = norm_angle(angle_hi);
    for (const Vec2& v : poly.vertices) {
        const double theta = norm_angle(std::atan2(v.y - center.y, v.x - center.x));
        const double off = angular_pos(theta, lo);
        if (off > 1e-15 && off < span - 1e-15) continue;  // strictly inside the cut
        kept.push_back({angular_pos(theta, hi_norm), v});
    }
    kept.push_back({kTwoPi - span, q_lo});
    std::stable_sort(kept.begin(), kept.end(),
                     [](const Keyed& a, const Keyed& b) { return a.key < b.key; });

    std::vector<Vec2> out;
    out.reserve(kept.size());
    for (const auto& k : kept) out.push_back(k.v);
    clean_loop(out);
    if (out.size() < 3) return std::nullopt;
    ConvexPolygon result{std::move(out)};
    if (!is_strictly_convex_ccw(result)) return std::nullopt;
    return result;
}

std::optional<ConvexPolygon> cut_ring(const ConvexPolygon& poly, std::size_t ring_index,
                                      std::size_t ring_count) {
    if (ring_count < 1) throw ConfigError("cut_ring: ring count must be >= 1");
    if (ring_index != ring_count)
        throw ContractError("cut_ring: only the outermost ring is removable");
    if (ring_count == 1) return std::nullopt;

    const Vec2 c = polygon_centroid(poly);
    const double f = static_cast<double>(ring_count - 1) / static_cast<double>(ring_count);
    ConvexPolygon out;
    out.vertices.reserve(poly.vertices.size());
    for (const Vec2& v : poly.vertices) out.vertices.push_back(c + (v - c) * f);
    return out;
}

}  // namespace stsne
