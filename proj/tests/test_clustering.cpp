#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "stsne/clustering.hpp"
#include "stsne/errors.hpp"
#include "stsne/reference.hpp"
#include "stsne/rng.hpp"

using namespace stsne;

namespace {

std::vector<LowDimPoint> two_blobs(std::size_t per_side, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<LowDimPoint> pts;
    for (std::size_t i = 0; i < 2 * per_side; ++i) {
        const double cx = (i < per_side) ? -5.0 : 5.0;
        pts.push_back({i, {cx + rng.gaussian(0.0, 0.4), rng.gaussian(0.0, 0.4)}});
    }
    return pts;
}

/// Map from source_id to the set of source_ids sharing its cluster; noise
/// points map to themselves only. Label-permutation invariant.
std::map<std::uint64_t, std::set<std::uint64_t>> partition_of(
    const std::vector<LowDimPoint>& pts, const ClusterLabels& lab) {
    std::map<int, std::set<std::uint64_t>> groups;
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (lab.labels[i] != ClusterLabels::kNoise) groups[lab.labels[i]].insert(pts[i].source_id);
    std::map<std::uint64_t, std::set<std::uint64_t>> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (lab.labels[i] == ClusterLabels::kNoise)
            out[pts[i].source_id] = {pts[i].source_id};
        else
            out[pts[i].source_id] = groups[lab.labels[i]];
    }
    return out;
}

}  // namespace

TEST_CASE("cluster_embedding separates two blobs and flags far noise") {
    auto pts = two_blobs(30, 3);
    pts.push_back({999, {0.0, 50.0}});
    const auto lab = cluster_embedding(pts, 1.5, 5);
    CHECK(lab.cluster_count == 2);
    REQUIRE(lab.labels.size() == 61);
    for (std::size_t i = 1; i < 30; ++i) CHECK(lab.labels[i] == lab.labels[0]);
    for (std::size_t i = 31; i < 60; ++i) CHECK(lab.labels[i] == lab.labels[30]);
    CHECK(lab.labels[0] != lab.labels[30]);
    CHECK(lab.labels[60] == ClusterLabels::kNoise);
    // Labels are contiguous starting at zero, in scan order.
    CHECK(lab.labels[0] == 0);
    CHECK(lab.labels[30] == 1);
}

TEST_CASE("cluster_embedding fuses blobs under a generous eps") {
    const auto pts = two_blobs(30, 4);
    const auto lab = cluster_embedding(pts, 11.0, 5);
    CHECK(lab.cluster_count == 1);
    for (int l : lab.labels) CHECK(l == 0);
}

TEST_CASE("cluster_embedding marks everything noise when min_pts is unreachable") {
    const auto pts = two_blobs(5, 8);
    const auto lab = cluster_embedding(pts, 0.01, 4);
    CHECK(lab.cluster_count == 0);
    for (int l : lab.labels) CHECK(l == ClusterLabels::kNoise);
}

TEST_CASE("a chain of core points connects into one cluster") {
    std::vector<LowDimPoint> pts;
    for (std::uint64_t i = 0; i < 12; ++i)
        pts.push_back({i, {static_cast<double>(i) * 0.9, 0.0}});
    const auto lab = cluster_embedding(pts, 1.0, 3);
    CHECK(lab.cluster_count == 1);
    for (int l : lab.labels) CHECK(l == 0);
}

TEST_CASE("border points attach to the nearest core") {
    // Core group A around x = 0, core group B around x = 4, border at 1.8:
    // within eps of cores from both sides only if eps is big; keep it so the
    // border reaches exactly one A core and one B core and distance decides.
    std::vector<LowDimPoint> pts;
    std::uint64_t id = 0;
    for (double dx : {-0.2, 0.0, 0.2}) pts.push_back({id++, {dx, 0.0}});        // A cores
    for (double dx : {3.8, 4.0, 4.2}) pts.push_back({id++, {dx, 0.0}});         // B cores
    pts.push_back({id++, {1.7, 0.0}});                                          // border
    const auto lab = cluster_embedding(pts, 1.6, 3);
    CHECK(lab.cluster_count == 2);
    // The border reaches the A core at 0.2 (d = 1.5) and nothing in B
    // (nearest B core 3.8 is 2.1 away), so it joins A.
    CHECK(lab.labels[6] == lab.labels[0]);
    CHECK(lab.labels[6] != lab.labels[3]);
}

TEST_CASE("cluster_embedding agrees with the quadratic oracle") {
    Rng shape_rng(40);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const std::size_t n = 50 + static_cast<std::size_t>(shape_rng.uniform() * 250);
        Rng rng(700 + seed);
        std::vector<LowDimPoint> pts;
        for (std::size_t i = 0; i < n; ++i)
            pts.push_back({i, {rng.gaussian(0.0, 1.0), rng.gaussian(0.0, 1.0)}});
        const double eps = 0.15 + shape_rng.uniform() * 0.5;
        const std::size_t min_pts = 2 + static_cast<std::size_t>(shape_rng.uniform() * 6);
        const auto fast = cluster_embedding(pts, eps, min_pts);
        const auto slow = ref::dbscan_quadratic(pts, eps, min_pts);
        CHECK(fast.labels == slow.labels);
        CHECK(fast.cluster_count == slow.cluster_count);
    }
}

TEST_CASE("the induced partition is stable under input permutation") {
    Rng rng(15);
    std::vector<LowDimPoint> pts;
    for (std::size_t i = 0; i < 120; ++i)
        pts.push_back({i, {rng.gaussian(0.0, 1.2), rng.gaussian(0.0, 1.2)}});
    const auto base = partition_of(pts, cluster_embedding(pts, 0.45, 4));

    auto shuffled = pts;
    Rng perm(88);
    for (std::size_t i = shuffled.size(); i > 1; --i)
        std::swap(shuffled[i - 1], shuffled[perm.next_u64() % i]);
    const auto again = partition_of(shuffled, cluster_embedding(shuffled, 0.45, 4));
    CHECK(base == again);
}

TEST_CASE("cluster labels are contiguous from zero") {
    Rng rng(29);
    std::vector<LowDimPoint> pts;
    for (std::size_t i = 0; i < 200; ++i)
        pts.push_back({i, {rng.gaussian(0.0, 2.0), rng.gaussian(0.0, 2.0)}});
    const auto lab = cluster_embedding(pts, 0.5, 4);
    std::set<int> seen;
    for (int l : lab.labels)
        if (l != ClusterLabels::kNoise) seen.insert(l);
    CHECK(static_cast<int>(seen.size()) == lab.cluster_count);
    if (!seen.empty()) {
        CHECK(*seen.begin() == 0);
        CHECK(*seen.rbegin() == lab.cluster_count - 1);
    }
}

TEST_CASE("cluster_embedding input contracts") {
    const auto pts = two_blobs(4, 2);
    CHECK_THROWS_AS(cluster_embedding(pts, 0.0, 3), ConfigError);
    CHECK_THROWS_AS(cluster_embedding(pts, -1.0, 3), ConfigError);
    CHECK_THROWS_AS(cluster_embedding(pts, 1.0, 0), ConfigError);
    CHECK(cluster_embedding({}, 1.0, 3).labels.empty());
}
