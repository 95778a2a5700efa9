#pragma once

#include <cstdint>
#include <vector>

namespace stsne {

/// 2-D vector used for embedding coordinates and hull geometry.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double sq_norm(const Vec2& a) { return a.x * a.x + a.y * a.y; }

/// One stream element: a D-dimensional feature vector with a unique,
/// monotonically increasing sequence id.
struct HighDimPoint {
    std::uint64_t id = 0;
    std::vector<double> coords;
};

/// A projected point. `source_id` refers to the HighDimPoint it projects.
struct LowDimPoint {
    std::uint64_t source_id = 0;
    Vec2 pos;
};

/// The retained reference frame for partial embedding: PEDRUL points with
/// paired high-dimensional coordinates and frozen low-dimensional positions.
/// `high[i].id == low[i].source_id` for all i.
struct AnchorSet {
    std::vector<HighDimPoint> high;
    std::vector<LowDimPoint> low;

    std::size_t size() const { return high.size(); }
    bool empty() const { return high.empty(); }
};

}  // namespace stsne
