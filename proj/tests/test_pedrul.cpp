#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "stsne/errors.hpp"
#include "stsne/kdtree.hpp"
#include "stsne/pedrul.hpp"
#include "stsne/reference.hpp"
#include "stsne/rng.hpp"

using namespace stsne;

namespace {

std::vector<HighDimPoint> random_points(std::size_t n, std::size_t dim, std::uint64_t seed,
                                        double spread = 1.0) {
    Rng rng(seed);
    std::vector<HighDimPoint> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i].id = i;
        pts[i].coords.resize(dim);
        for (auto& c : pts[i].coords) c = rng.gaussian(0.0, spread);
    }
    return pts;
}

double dist(const HighDimPoint& a, const HighDimPoint& b) {
    double s = 0.0;
    for (std::size_t d = 0; d < a.coords.size(); ++d) {
        const double diff = a.coords[d] - b.coords[d];
        s += diff * diff;
    }
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("kdtree radius query on a hand-built line") {
    std::vector<HighDimPoint> pts;
    for (std::uint64_t i = 0; i < 6; ++i) pts.push_back({i, {static_cast<double>(i)}});
    KdTree tree(pts);
    // Radius boundary is inclusive; own id is excluded.
    CHECK(tree.radius_neighbors(pts[2], 1.0) == std::vector<std::uint64_t>{1, 3});
    CHECK(tree.radius_neighbors(pts[0], 2.0) == std::vector<std::uint64_t>{1, 2});
    CHECK(tree.radius_neighbors(pts[5], 0.5).empty());
    // Query point not stored in the tree keeps everything within range.
    HighDimPoint q{99, {2.5}};
    CHECK(tree.radius_neighbors(q, 0.5) == std::vector<std::uint64_t>{2, 3});
}

TEST_CASE("kdtree handles duplicate coordinates") {
    std::vector<HighDimPoint> pts;
    for (std::uint64_t i = 0; i < 40; ++i) pts.push_back({i, {1.0, 2.0, 3.0}});
    KdTree tree(pts, 4);
    CHECK_THROWS_AS(tree.radius_neighbors(pts[7], 0.0), ConfigError);
    const auto got = tree.radius_neighbors(pts[7], 1e-12);
    REQUIRE(got.size() == 39);
    CHECK(std::is_sorted(got.begin(), got.end()));
    CHECK(std::find(got.begin(), got.end(), 7) == got.end());
}

TEST_CASE("kdtree is balanced enough") {
    const auto pts = random_points(1024, 6, 3);
    KdTree tree(pts, 16);
    CHECK(tree.size() == 1024);
    // 1024/16 = 64 leaves -> ideal depth 6; allow slack for uneven splits.
    CHECK(tree.height() <= 12);
}

TEST_CASE("kdtree matches brute force on random queries") {
    for (std::uint64_t seed : {41ull, 42ull}) {
        const auto pts = random_points(300, 5, seed);
        KdTree tree(pts, 8);
        for (std::size_t i = 0; i < 300; i += 17) {
            for (double r : {0.2, 0.8, 1.5, 4.0}) {
                CHECK(tree.radius_neighbors(pts[i], r) ==
                      ref::radius_neighbors_bruteforce(pts, pts[i], r));
            }
        }
    }
}

TEST_CASE("select_pedrul picks cluster centers before satellites") {
    // Two star shapes: a hub with six points at distance 0.5, hubs 10 apart.
    std::vector<HighDimPoint> pts;
    std::uint64_t id = 0;
    for (double cx : {0.0, 10.0}) {
        pts.push_back({id++, {cx, 0.0}});
        for (int k = 0; k < 6; ++k) {
            const double ang = k * M_PI / 3.0;
            pts.push_back({id++, {cx + 0.5 * std::cos(ang), 0.5 * std::sin(ang)}});
        }
    }
    const auto sel = select_pedrul(pts, 0.6, 10);
    // Hubs see 6 neighbors each; satellites see the hub plus two ring
    // neighbors (ring spacing 0.5 <= 0.6). Hubs win, then exclusion within
    // 0.6 kills the satellites' chances only near accepted points.
    REQUIRE(sel.chosen.size() == 2);  // every satellite sits within r of a hub
    CHECK(sel.chosen[0] == 0);
    CHECK(sel.chosen[1] == 7);
    CHECK(sel.neighbor_counts.at(0) == 6);
    CHECK(sel.neighbor_counts.at(7) == 6);
    // Everything chosen is pairwise farther than the radius.
    for (std::size_t i = 0; i < sel.chosen.size(); ++i)
        for (std::size_t j = i + 1; j < sel.chosen.size(); ++j)
            CHECK(dist(pts[sel.chosen[i]], pts[sel.chosen[j]]) > 0.6);
}

TEST_CASE("select_pedrul budget of one takes the lowest id among tied counts") {
    std::vector<HighDimPoint> pts{{5, {0.0}}, {9, {1.0}}, {2, {100.0}}, {3, {101.0}}};
    // Every point has exactly one neighbor within r = 1: a four-way tie.
    const auto sel = select_pedrul(pts, 1.0, 1);
    REQUIRE(sel.chosen.size() == 1);
    CHECK(sel.chosen[0] == 2);
}

TEST_CASE("select_pedrul respects the budget and orders by count then id") {
    const auto pts = random_points(400, 4, 8);
    const auto sel = select_pedrul(pts, 0.9, 25);
    CHECK(sel.chosen.size() <= 25);
    CHECK(sel.radius == 0.9);
    for (std::size_t i = 1; i < sel.chosen.size(); ++i) {
        const auto a = sel.neighbor_counts.at(sel.chosen[i - 1]);
        const auto b = sel.neighbor_counts.at(sel.chosen[i]);
        CHECK(a >= b);
        if (a == b) CHECK(sel.chosen[i - 1] < sel.chosen[i]);
    }
}

TEST_CASE("select_pedrul agrees with the quadratic oracle") {
    Rng shape_rng(12);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const std::size_t n = 20 + static_cast<std::size_t>(shape_rng.uniform() * 180);
        const std::size_t dim = 2 + static_cast<std::size_t>(shape_rng.uniform() * 4);
        const double r = 0.3 + shape_rng.uniform() * 1.2;
        const std::size_t budget = 1 + static_cast<std::size_t>(shape_rng.uniform() * 40);
        const auto pts = random_points(n, dim, 1000 + seed, 1.2);
        const auto fast = select_pedrul(pts, r, budget);
        const auto slow = ref::select_pedrul_quadratic(pts, r, budget);
        CHECK(fast.chosen == slow.chosen);
        CHECK(fast.neighbor_counts == slow.neighbor_counts);
    }
}

TEST_CASE("select_pedrul exclusion holds on a dense cloud") {
    const auto pts = random_points(500, 3, 77, 0.8);
    const auto sel = select_pedrul(pts, 0.5, 100);
    for (std::size_t i = 0; i < sel.chosen.size(); ++i)
        for (std::size_t j = i + 1; j < sel.chosen.size(); ++j) {
            const auto& a = pts[sel.chosen[i]];
            const auto& b = pts[sel.chosen[j]];
            CHECK(dist(a, b) > 0.5);
        }
}

TEST_CASE("select_pedrul input contracts") {
    const auto pts = random_points(10, 3, 2);
    CHECK_THROWS_AS(select_pedrul(pts, 0.5, 0), ConfigError);
    CHECK_THROWS_AS(select_pedrul(pts, 0.0, 5), ConfigError);
    CHECK_THROWS_AS(select_pedrul(pts, -1.0, 5), ConfigError);
    CHECK(select_pedrul({}, 0.5, 5).chosen.empty());
}

TEST_CASE("auto_radius is a quarter of the median pairwise distance") {
    // Distances: |0-3| = 3, |0-7| = 7, |3-7| = 4 -> median 4 -> radius 1.
    std::vector<HighDimPoint> pts{{0, {0.0}}, {1, {3.0}}, {2, {7.0}}};
    CHECK(auto_radius(pts) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("auto_radius rejects degenerate inputs") {
    std::vector<HighDimPoint> same{{0, {2.0}}, {1, {2.0}}, {2, {2.0}}};
    CHECK_THROWS_AS(auto_radius(same), ConfigError);
    CHECK_THROWS_AS(auto_radius({}), ConfigError);
    CHECK_THROWS_AS(auto_radius({{0, {1.0}}}), ConfigError);
}
