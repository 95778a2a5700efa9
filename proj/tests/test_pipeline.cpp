#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "stsne/errors.hpp"
#include "stsne/pipeline.hpp"
#include "stsne/rng.hpp"
#include "stsne/snapshot.hpp"
#include "stsne/streamgen.hpp"

using namespace stsne;

namespace {

RunConfig small_config() {
    RunConfig c;
    c.batch_size = 200;
    c.pedrul_budget = 60;
    c.radius = 2.0;  // auto sizing keys off the blob separation, far too wide
    c.perplexity = 15.0;
    c.fit_early_iters = 60;
    c.fit_opt_iters = 120;
    c.partial_iters = 50;
    c.cluster_eps = 6.0;
    c.cluster_min_pts = 5;
    c.slice_fraction = 0.2;
    c.expected_total = 1000;
    c.seed = 3;
    c.collect_timing = false;
    return c;
}

std::vector<HighDimPoint> blob_points(std::size_t n, std::uint64_t seed) {
    // Two tight 10-D blobs, round-robin, ids in stream order.
    Rng rng(seed);
    std::vector<HighDimPoint> pts;
    for (std::size_t i = 0; i < n; ++i) {
        HighDimPoint p;
        p.id = i;
        p.coords.resize(10);
        for (auto& c : p.coords) c = rng.gaussian();
        p.coords[0] += (i % 2 == 0) ? -15.0 : 15.0;
        pts.push_back(std::move(p));
    }
    return pts;
}

std::string csv_of(const Pipeline& p) {
    std::ostringstream out;
    p.metrics().write_csv(out);
    return out.str();
}

}  // namespace

TEST_CASE("validate_config rejects each bad field") {
    RunConfig c;
    c.expected_total = 10000;
    validate_config(c);  // the defaults are fine

    auto expect_bad = [](RunConfig cfg) { CHECK_THROWS_AS(validate_config(cfg), ConfigError); };
    {
        auto b = c;
        b.batch_size = 3;
        expect_bad(b);
    }
    {
        auto b = c;
        b.pedrul_budget = 0;
        expect_bad(b);
    }
    {
        auto b = c;
        b.radius = 0.0;
        expect_bad(b);
    }
    {
        auto b = c;
        b.perplexity = 0.5;
        expect_bad(b);
    }
    {
        auto b = c;
        b.decay.alpha = 0.0;
        expect_bad(b);
    }
    {
        auto b = c;
        b.decay.eta = -0.1;
        expect_bad(b);
    }
    {
        auto b = c;
        b.rings = 0;
        expect_bad(b);
    }
    {
        auto b = c;
        b.cluster_eps = 0.0;
        expect_bad(b);
    }
    {
        auto b = c;
        b.cluster_min_pts = 0;
        expect_bad(b);
    }
    {
        auto b = c;
        b.slice_fraction = 0.0;
        expect_bad(b);
    }
    {
        auto b = c;
        b.slice_fraction = 1.5;
        expect_bad(b);
    }
    {
        auto b = c;
        b.slice_fraction = 0.01;  // opening of 100 cannot cover a 400 batch
        expect_bad(b);
    }
}

TEST_CASE("config_hash tracks fields but ignores the timing flag") {
    RunConfig a;
    RunConfig b;
    CHECK(config_hash(a) == config_hash(b));
    b.collect_timing = !a.collect_timing;
    CHECK(config_hash(a) == config_hash(b));
    b = a;
    b.seed = a.seed + 1;
    CHECK(config_hash(a) != config_hash(b));
    b = a;
    b.cluster_eps = 2.5;
    CHECK(config_hash(a) != config_hash(b));
    b = a;
    b.radius = 1.0;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("ingest triggers on the opening slice then per batch") {
    RunConfig c = small_config();
    c.batch_size = 4;
    c.pedrul_budget = 8;
    c.perplexity = 2.0;
    c.cluster_min_pts = 50;  // keep clustering quiet at this scale
    c.expected_total = std::nullopt;
    Pipeline p(c);

    const auto pts = blob_points(11, 5);
    for (std::size_t i = 0; i < 3; ++i) CHECK(!p.ingest(pts[i]));
    CHECK(p.storage_size() == 3);
    CHECK(p.ingest(pts[3]));  // opening with no expected_total is one batch
    CHECK(p.iterations() == 1);
    CHECK(p.storage_size() == 0);

    for (std::size_t i = 4; i < 7; ++i) CHECK(!p.ingest(pts[i]));
    CHECK(p.ingest(pts[7]));
    CHECK(p.iterations() == 2);

    // finish projects a short leftover batch once the model exists.
    CHECK(!p.ingest(pts[8]));
    CHECK(p.finish());
    CHECK(p.iterations() == 3);
    CHECK(p.storage_size() == 0);
    CHECK(!p.finish());  // nothing pending
}

TEST_CASE("a pipeline with no prior fit cannot finish on a tiny remnant") {
    RunConfig c = small_config();
    c.batch_size = 4;
    c.expected_total = std::nullopt;
    c.perplexity = 2.0;
    Pipeline p(c);
    const auto pts = blob_points(3, 9);
    for (const auto& pt : pts) CHECK(!p.ingest(pt));
    CHECK(!p.finish());
    CHECK(p.iterations() == 0);
}

TEST_CASE("bad points are logged and skipped without stopping the stream") {
    RunConfig c = small_config();
    c.batch_size = 4;
    c.expected_total = std::nullopt;
    c.perplexity = 2.0;
    c.cluster_min_pts = 50;
    Pipeline p(c);

    CHECK(!p.ingest({0, {1.0, 2.0}}));
    CHECK(!p.ingest({1, {1.0, 2.0, 3.0}}));  // dimension mismatch
    REQUIRE(p.error_log().size() == 1);
    CHECK(p.error_log()[0].find("id 1") != std::string::npos);
    CHECK(p.error_log()[0].find("dimension") != std::string::npos);

    CHECK(!p.ingest({2, {}}));  // empty
    CHECK(!p.ingest({3, {1.0, std::numeric_limits<double>::infinity()}}));
    CHECK(p.error_log().size() == 3);

    CHECK(!p.ingest({4, {0.5, 0.5}}));
    CHECK(!p.ingest({5, {0.0, 1.0}}));
    CHECK(p.ingest({6, {1.0, 0.0}}));  // 4 good points: 0, 4, 5, 6
    CHECK(p.iterations() == 1);
}

TEST_CASE("the opening projection builds anchors, clusters and hulls") {
    RunConfig c = small_config();
    Pipeline p(c);
    const auto pts = blob_points(200, 17);
    std::size_t projections = 0;
    for (const auto& pt : pts) projections += p.ingest(pt) ? 1 : 0;
    REQUIRE(projections == 1);
    CHECK(p.iterations() == 1);

    const auto& anchors = p.anchors();
    CHECK(anchors.size() > 0);
    CHECK(anchors.size() <= c.pedrul_budget);
    CHECK(p.anchor_clusters().size() == anchors.size());
    CHECK(p.resolved_radius() > 0.0);
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        CHECK(anchors.high[i].id == anchors.low[i].source_id);
        if (i > 0) CHECK(anchors.high[i - 1].id < anchors.high[i].id);
    }

    // Two well separated blobs should close into two tracked hulls.
    REQUIRE(p.hulls().size() == 2);
    for (const auto& h : p.hulls()) {
        CHECK(is_strictly_convex_ccw(h.polygon));
        CHECK(h.partition.born_at == 1);
        CHECK(polygon_area(h.polygon) > 0.0);
    }
    CHECK(p.hulls()[0].id < p.hulls()[1].id);
    CHECK(p.hulls()[0].cluster_id != p.hulls()[1].cluster_id);

    const auto snap = p.snapshot();
    CHECK(snap.t == 1);
    CHECK(snap.config_hash == config_hash(c));
    CHECK(snap.hulls.size() == 2);
    CHECK(snap.anchors.size() == anchors.size());
}

TEST_CASE("multi-batch run keeps the invariants every iteration") {
    RunConfig c = small_config();
    Pipeline p(c);
    const auto pts = blob_points(1000, 23);

    std::map<std::uint64_t, Vec2> last_anchor_pos;
    std::int64_t seen = 0;
    for (const auto& pt : pts) {
        if (!p.ingest(pt)) continue;
        ++seen;
        CHECK(p.iterations() == seen);
        CHECK(p.storage_size() == 0);

        const auto& anchors = p.anchors();
        CHECK(anchors.size() > 0);
        CHECK(anchors.size() <= c.pedrul_budget);
        CHECK(p.anchor_clusters().size() == anchors.size());

        // Anchors kept from the previous iteration must not move.
        for (std::size_t i = 0; i < anchors.size(); ++i) {
            const auto it = last_anchor_pos.find(anchors.low[i].source_id);
            if (it != last_anchor_pos.end()) {
                CHECK(anchors.low[i].pos.x == it->second.x);
                CHECK(anchors.low[i].pos.y == it->second.y);
            }
        }
        last_anchor_pos.clear();
        for (const auto& lp : anchors.low) last_anchor_pos[lp.source_id] = lp.pos;

        std::uint64_t prev_id = 0;
        bool first_hull = true;
        for (const auto& h : p.hulls()) {
            CHECK(is_strictly_convex_ccw(h.polygon));
            if (!first_hull) CHECK(prev_id < h.id);
            prev_id = h.id;
            first_hull = false;
            CHECK(h.partition.born_at <= p.iterations());
        }
        CHECK(p.metrics().series().size() == static_cast<std::size_t>(seen));
        CHECK(p.metrics().series().back().t == seen);
    }
    CHECK(seen == 5);
    CHECK(p.hulls().size() == 2);

    // Timing was off, so the timing columns must be zero while KLD is real.
    for (const auto& m : p.metrics().series()) {
        CHECK(m.embed_ms == 0.0);
        CHECK(m.kld.has_value());
        CHECK(*m.kld >= 0.0);
    }
}

TEST_CASE("identical configs and streams give identical runs") {
    const auto pts = blob_points(1000, 31);
    RunConfig c = small_config();

    Pipeline a(c);
    Pipeline b(c);
    for (const auto& pt : pts) {
        const bool ca = a.ingest(pt);
        const bool cb = b.ingest(pt);
        CHECK(ca == cb);
        if (ca) CHECK(snapshot_equal(a.snapshot(), b.snapshot()));
    }
    CHECK(csv_of(a) == csv_of(b));

    Pipeline other(c);
    auto shifted = pts;
    for (auto& pt : shifted) pt.coords[1] += 0.25;
    for (const auto& pt : shifted) other.ingest(pt);
    CHECK(csv_of(other) != csv_of(a));
}

TEST_CASE("snapshots survive a file round trip byte for byte") {
    RunConfig c = small_config();
    Pipeline p(c);
    const auto pts = blob_points(200, 41);
    for (const auto& pt : pts) p.ingest(pt);
    const auto snap = p.snapshot();

    const std::string path = "pipeline_snap_test.json";
    write_snapshot_file(path, snap);
    const auto loaded = read_snapshot_file(path);
    CHECK(snapshot_equal(snap, loaded));

    // Writing the loaded snapshot again reproduces the bytes exactly.
    std::ostringstream first;
    write_snapshot(first, snap);
    std::ostringstream second;
    write_snapshot(second, loaded);
    CHECK(first.str() == second.str());
    std::remove(path.c_str());
}

TEST_CASE("read_snapshot rejects malformed input") {
    std::istringstream garbage("this is not a snapshot");
    CHECK_THROWS_AS(read_snapshot(garbage), DataError);
    std::istringstream wrong_shape(R"({"t": "five"})");
    CHECK_THROWS_AS(read_snapshot(wrong_shape), DataError);
}

TEST_CASE("pipeline constructor validates the config") {
    RunConfig c;
    c.batch_size = 2;
    CHECK_THROWS_AS(Pipeline{c}, ConfigError);
    CHECK_THROWS_AS(BaselineRunner{c}, ConfigError);
}

TEST_CASE("baseline runner refits on every batch and keeps everything") {
    RunConfig c;
    c.batch_size = 4;
    c.perplexity = 2.0;
    c.fit_early_iters = 10;
    c.fit_opt_iters = 20;
    c.slice_fraction = 0.5;
    c.expected_total = 40;
    c.seed = 7;
    c.collect_timing = false;
    BaselineRunner r(c);

    const auto pts = blob_points(40, 47);
    std::vector<std::size_t> stored_at_projection;
    for (const auto& pt : pts)
        if (r.ingest(pt)) stored_at_projection.push_back(r.stored());

    // Opening at 20 points, then every 4: retained counts grow linearly.
    CHECK(stored_at_projection ==
          std::vector<std::size_t>{20, 24, 28, 32, 36, 40});
    CHECK(r.iterations() == 6);
    CHECK(r.stored() == 40);
    CHECK(r.embedding().size() == 40);
    CHECK(!r.finish());  // nothing pending

    for (const auto& m : r.metrics().series()) {
        REQUIRE(m.kld.has_value());
        CHECK(*m.kld >= 0.0);
        CHECK(m.anchors > 0);  // the anchors column tracks retained points
    }
    CHECK(r.metrics().series().back().anchors == 40);
}

TEST_CASE("baseline finish projects a pending remnant") {
    RunConfig c;
    c.batch_size = 4;
    c.perplexity = 2.0;
    c.fit_early_iters = 10;
    c.fit_opt_iters = 20;
    c.expected_total = std::nullopt;
    c.collect_timing = false;
    BaselineRunner r(c);
    const auto pts = blob_points(6, 53);
    for (const auto& pt : pts) r.ingest(pt);
    CHECK(r.iterations() == 1);  // triggered at 4
    CHECK(r.finish());           // remnant of 2 reprojects over all 6
    CHECK(r.iterations() == 2);
    CHECK(r.embedding().size() == 6);
}

TEST_CASE("baseline runs are deterministic") {
    RunConfig c;
    c.batch_size = 8;
    c.perplexity = 3.0;
    c.fit_early_iters = 15;
    c.fit_opt_iters = 30;
    c.expected_total = std::nullopt;
    c.collect_timing = false;
    const auto pts = blob_points(32, 61);

    BaselineRunner a(c);
    BaselineRunner b(c);
    for (const auto& pt : pts) {
        a.ingest(pt);
        b.ingest(pt);
    }
    REQUIRE(a.embedding().size() == b.embedding().size());
    for (std::size_t i = 0; i < a.embedding().size(); ++i) {
        CHECK(a.embedding()[i].pos.x == b.embedding()[i].pos.x);
        CHECK(a.embedding()[i].pos.y == b.embedding()[i].pos.y);
    }
    std::ostringstream csv_a;
    a.metrics().write_csv(csv_a);
    std::ostringstream csv_b;
    b.metrics().write_csv(csv_b);
    CHECK(csv_a.str() == csv_b.str());
}

TEST_CASE("baseline refuses streams beyond its cap") {
    RunConfig c;
    c.batch_size = 4;
    c.perplexity = 2.0;
    c.expected_total = 100;
    c.slice_fraction = 0.2;
    CHECK_THROWS_AS(BaselineRunner(c, 50), DataError);

    c.expected_total = std::nullopt;
    BaselineRunner r(c, 6);
    const auto pts = blob_points(8, 71);
    for (std::size_t i = 0; i < 6; ++i) r.ingest(pts[i]);
    CHECK_THROWS_AS(r.ingest(pts[6]), DataError);
}
