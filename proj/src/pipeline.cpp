#include "stsne/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>

#include "stsne/errors.hpp"
#include "stsne/geometry.hpp"
#include "stsne/partial_embed.hpp"
#include "stsne/pedrul.hpp"
#include "stsne/tsne.hpp"

namespace stsne {

void validate_config(const RunConfig& c) {
    if (c.batch_size < 4) throw ConfigError("config: batch size must be >= 4");
    if (c.pedrul_budget < 1) throw ConfigError("config: pedrul budget must be >= 1");
    if (c.radius && *c.radius <= 0.0) throw ConfigError("config: radius must be positive");
    if (c.perplexity < 1.0) throw ConfigError("config: perplexity must be >= 1");
    if (c.decay.alpha <= 0.0) throw ConfigError("config: alpha must be positive");
    if (c.decay.eta < 0.0) throw ConfigError("config: eta must be >= 0");
    if (c.rings < 1) throw ConfigError("config: ring count must be >= 1");
    if (c.cluster_eps <= 0.0) throw ConfigError("config: cluster eps must be positive");
    if (c.cluster_min_pts < 1) throw ConfigError("config: cluster min_pts must be >= 1");
    if (c.slice_fraction <= 0.0 || c.slice_fraction > 1.0)
        throw ConfigError("config: slice fraction must be in (0, 1]");
    if (c.expected_total) {
        const double opening = c.slice_fraction * static_cast<double>(*c.expected_total);
        if (opening < static_cast<double>(c.batch_size))
            throw ConfigError("config: slice * expected total must cover one batch");
    }
}

std::uint64_t config_hash(const RunConfig& c) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "B=%zu;D=%zu;R=%.17g;perp=%.17g;fitE=%zu;fitO=%zu;partial=%zu;"
                  "alpha=%.17g;beta=%.17g;eta=%.17g;rings=%zu;eps=%.17g;minpts=%zu;"
                  "slice=%.17g;seed=%llu;total=%lld",
                  c.batch_size, c.pedrul_budget, c.radius ? *c.radius : -1.0, c.perplexity,
                  c.fit_early_iters, c.fit_opt_iters, c.partial_iters, c.decay.alpha,
                  c.decay.beta, c.decay.eta, c.rings, c.cluster_eps, c.cluster_min_pts,
                  c.slice_fraction, static_cast<unsigned long long>(c.seed),
                  c.expected_total ? static_cast<long long>(*c.expected_total) : -1LL);
    std::uint64_t h = 1469598103934665603ull;
    for (const char* p = buf; *p; ++p) {
        h ^= static_cast<unsigned char>(*p);
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

}  // namespace

Pipeline::Pipeline(const RunConfig& config) : config_(config) {
    validate_config(config_);
    config_hash_ = config_hash(config_);
}

std::size_t Pipeline::opening_size() const {
    if (!config_.expected_total) return config_.batch_size;
    const auto sz = static_cast<std::size_t>(std::llround(
        config_.slice_fraction * static_cast<double>(*config_.expected_total)));
    return std::max(sz, config_.batch_size);
}

bool Pipeline::ingest(const HighDimPoint& point) {
    bool finite = true;
    for (double c : point.coords) finite = finite && std::isfinite(c);
    if (point.coords.empty() || !finite) {
        error_log_.push_back("rejected point id " + std::to_string(point.id) +
                             ": empty or non-finite coordinates");
        return false;
    }
    if (dim_ == 0) dim_ = point.coords.size();
    if (point.coords.size() != dim_) {
        error_log_.push_back("rejected point id " + std::to_string(point.id) +
                             ": dimension mismatch");
        return false;
    }
    storage_.push_back(point);
    const std::size_t trigger = t_ == 0 ? opening_size() : config_.batch_size;
    if (storage_.size() >= trigger) {
        project_batch();
        return true;
    }
    return false;
}

bool Pipeline::finish() {
    const std::size_t min_batch = t_ == 0 ? 4 : 1;
    if (storage_.size() < min_batch) return false;
    project_batch();
    return true;
}

void Pipeline::project_batch() {
    const bool first = t_ == 0;
    const auto t0 = Clock::now();

    // Embed the pending batch.
    std::vector<LowDimPoint> batch_low;
    if (first) {
        TsneParams params;
        params.perplexity = config_.perplexity;
        const double cap = static_cast<double>(storage_.size() - 2);
        if (params.perplexity > cap) {
            std::clog << "warning: fit perplexity " << params.perplexity << " clamped to "
                      << cap << " (opening slice of " << storage_.size() << ")\n";
            params.perplexity = std::max(1.0, cap);
        }
        params.early_exaggeration_iters = config_.fit_early_iters;
        params.optimization_iters = config_.fit_opt_iters;
        params.seed = config_.seed;
        batch_low = fit(storage_, params);
    } else {
        const Matrix cross = cross_affinities(storage_, anchors_, config_.perplexity);
        const auto init = init_positions(cross, anchors_, storage_);
        batch_low = optimize_partial(init, anchors_, cross,
                                     PartialParams{config_.partial_iters, 200.0});
    }
    const auto t1 = Clock::now();

    // Representative refresh over old anchors plus the batch.
    std::vector<HighDimPoint> pool_high = anchors_.high;
    pool_high.insert(pool_high.end(), storage_.begin(), storage_.end());
    std::vector<LowDimPoint> pool_low = anchors_.low;
    pool_low.insert(pool_low.end(), batch_low.begin(), batch_low.end());

    if (resolved_radius_ == 0.0)
        resolved_radius_ = config_.radius ? *config_.radius : auto_radius(pool_high);
    const PedrulSelection sel =
        select_pedrul(pool_high, resolved_radius_, config_.pedrul_budget);

    std::map<std::uint64_t, std::size_t> pool_index;
    for (std::size_t i = 0; i < pool_high.size(); ++i) pool_index[pool_high[i].id] = i;

    AnchorSet new_anchors;
    {
        std::vector<std::uint64_t> chosen = sel.chosen;
        std::sort(chosen.begin(), chosen.end());
        for (std::uint64_t id : chosen) {
            const std::size_t i = pool_index.at(id);
            new_anchors.high.push_back(pool_high[i]);
            new_anchors.low.push_back(pool_low[i]);
        }
    }
    const auto t2 = Clock::now();

    // Cluster the retained view (new anchors plus the batch) and rebuild hulls.
    std::set<std::uint64_t> cluster_ids;
    for (const auto& p : new_anchors.high) cluster_ids.insert(p.id);
    for (const auto& p : storage_) cluster_ids.insert(p.id);
    std::vector<LowDimPoint> cluster_low;
    cluster_low.reserve(cluster_ids.size());
    for (std::uint64_t id : cluster_ids) cluster_low.push_back(pool_low[pool_index.at(id)]);

    const ClusterLabels labels =
        cluster_embedding(cluster_low, config_.cluster_eps, config_.cluster_min_pts);

    const std::int64_t born_at = t_ + 1;
    std::vector<TrackedHull> new_hulls;
    std::set<int> built_hull;
    for (int c = 0; c < labels.cluster_count; ++c) {
        std::vector<Vec2> members;
        for (std::size_t i = 0; i < cluster_low.size(); ++i)
            if (labels.labels[i] == c) members.push_back(cluster_low[i].pos);
        auto hull = convex_hull(members);
        if (!hull) continue;  // degenerate cluster: keeps points, carries no hull
        built_hull.insert(c);
        TrackedHull th;
        th.cluster_id = c;
        th.polygon = std::move(*hull);
        new_hulls.push_back(std::move(th));
    }

    // Match to the previous projection's hulls for id stability and last_hit
    // carry-over: best overlap by vertex membership counted both ways (a hull
    // that grew contains every old vertex, one that shrank has every vertex
    // inside the old polygon), each old id claimed once.
    std::vector<const TrackedHull*> matched(new_hulls.size(), nullptr);
    {
        std::set<std::uint64_t> claimed;
        for (std::size_t h = 0; h < new_hulls.size(); ++h) {
            std::size_t best_count = 0;
            const TrackedHull* best = nullptr;
            // hulls_ is id-ascending, so ties keep the lowest old id.
            for (const auto& old : hulls_) {
                if (claimed.count(old.id)) continue;
                std::size_t count = 0;
                for (const Vec2& v : new_hulls[h].polygon.vertices)
                    if (contains(old.polygon, v)) ++count;
                for (const Vec2& v : old.polygon.vertices)
                    if (contains(new_hulls[h].polygon, v)) ++count;
                if (count > best_count) {
                    best_count = count;
                    best = &old;
                }
            }
            if (best) {
                claimed.insert(best->id);
                matched[h] = best;
                new_hulls[h].id = best->id;
            } else {
                new_hulls[h].id = next_hull_id_++;
            }
        }
    }

    for (std::size_t h = 0; h < new_hulls.size(); ++h) {
        auto& th = new_hulls[h];
        th.partition = build_cobweb(th.polygon, config_.rings, born_at);
        if (!matched[h]) continue;
        const auto& old_part = matched[h]->partition;
        for (std::size_t w = 0; w < th.partition.wedge_count(); ++w)
            for (std::size_t r = 0; r < th.partition.rings; ++r) {
                const auto corners = section_corners(th.partition, w, r);
                Vec2 rep{0.0, 0.0};
                for (const Vec2& cp : corners) rep = rep + cp;
                rep = rep * (1.0 / static_cast<double>(corners.size()));
                const auto old_sid = locate(old_part, rep);
                if (old_sid)
                    th.partition.last_hit[th.partition.section_id(w, r)] =
                        old_part.last_hit[*old_sid];
            }
    }
    std::sort(new_hulls.begin(), new_hulls.end(),
              [](const TrackedHull& a, const TrackedHull& b) { return a.id < b.id; });
    hulls_ = std::move(new_hulls);
    const auto t3 = Clock::now();

    t_ = born_at;

    // Forgetting pass: stamp hits from the new batch, slice starved sections,
    // then drop representatives stranded outside their cluster's hull.
    record_hits(hulls_, batch_low, t_);
    EcsResult ecs = apply_ecs(std::move(hulls_), t_, config_.decay);
    hulls_ = std::move(ecs.surviving);
    cuts_last_iter_ = ecs.cuts;
    cut_log_.insert(cut_log_.end(), ecs.cuts.begin(), ecs.cuts.end());

    {
        std::map<std::uint64_t, int> label_of;
        {
            std::size_t i = 0;
            for (std::uint64_t id : cluster_ids) label_of[id] = labels.labels[i++];
        }
        AnchorSet kept;
        std::vector<int> kept_clusters;
        for (std::size_t i = 0; i < new_anchors.size(); ++i) {
            const int label = label_of.at(new_anchors.high[i].id);
            bool keep = true;
            if (label != ClusterLabels::kNoise && built_hull.count(label)) {
                keep = false;
                for (const auto& th : hulls_) {
                    if (th.cluster_id != label) continue;
                    if (contains(th.polygon, new_anchors.low[i].pos)) keep = true;
                    break;
                }
            }
            if (keep) {
                kept.high.push_back(new_anchors.high[i]);
                kept.low.push_back(new_anchors.low[i]);
                kept_clusters.push_back(label);
            }
        }
        anchors_ = std::move(kept);
        anchor_clusters_ = std::move(kept_clusters);
    }
    const auto t4 = Clock::now();

    // Evaluation over the end-state anchors plus this batch, deduplicated.
    std::optional<double> kld;
    {
        std::map<std::uint64_t, std::size_t> eval_ids;  // id -> pool index
        for (const auto& p : anchors_.high) eval_ids[p.id] = pool_index.at(p.id);
        for (const auto& p : storage_) eval_ids[p.id] = pool_index.at(p.id);
        std::vector<HighDimPoint> highs;
        std::vector<Vec2> lows;
        highs.reserve(eval_ids.size());
        lows.reserve(eval_ids.size());
        for (const auto& [id, idx] : eval_ids) {
            highs.push_back(pool_high[idx]);
            lows.push_back(pool_low[idx].pos);
        }
        kld = streaming_kld(highs, lows, config_.perplexity);
    }

    storage_.clear();

    IterationMetrics m;
    m.t = t_;
    m.kld = kld;
    if (config_.collect_timing) {
        m.embed_ms = ms_between(t0, t1);
        m.pedrul_ms = ms_between(t1, t2);
        m.hull_ms = ms_between(t2, t3);
        m.ecs_ms = ms_between(t3, t4);
    }
    m.anchors = anchors_.size();
    std::size_t verts = 0;
    for (const auto& th : hulls_) verts += th.polygon.vertices.size();
    m.hull_vertices = verts;
    m.cuts = cuts_last_iter_.size();
    metrics_.record(m);
}

ProjectionSnapshot Pipeline::snapshot() const {
    ProjectionSnapshot snap;
    snap.t = t_;
    snap.config_hash = config_hash_;
    for (const auto& th : hulls_) snap.hulls.push_back(th.polygon.vertices);
    snap.anchors = anchors_.low;
    snap.cuts = cuts_last_iter_;
    return snap;
}

BaselineRunner::BaselineRunner(const RunConfig& config, std::size_t cap)
    : config_(config), cap_(cap) {
    validate_config(config_);
    if (config_.expected_total && *config_.expected_total > cap_)
        throw DataError("baseline: stream of " + std::to_string(*config_.expected_total) +
                        " points exceeds the cap of " + std::to_string(cap_));
}

std::size_t BaselineRunner::opening_size() const {
    if (!config_.expected_total) return config_.batch_size;
    const auto sz = static_cast<std::size_t>(std::llround(
        config_.slice_fraction * static_cast<double>(*config_.expected_total)));
    return std::max(sz, config_.batch_size);
}

bool BaselineRunner::ingest(const HighDimPoint& point) {
    if (points_.size() >= cap_)
        throw DataError("baseline: accumulated points exceed the cap of " +
                        std::to_string(cap_));
    points_.push_back(point);
    ++pending_;
    const std::size_t trigger = t_ == 0 ? opening_size() : config_.batch_size;
    if (pending_ >= trigger) {
        reproject();
        return true;
    }
    return false;
}

bool BaselineRunner::finish() {
    if (pending_ == 0 || points_.size() < 4) return false;
    reproject();
    return true;
}

void BaselineRunner::reproject() {
    const auto t0 = Clock::now();
    TsneParams params;
    params.perplexity = config_.perplexity;
    const double cap = static_cast<double>(points_.size() - 2);
    if (params.perplexity > cap) params.perplexity = std::max(1.0, cap);
    params.early_exaggeration_iters = config_.fit_early_iters;
    params.optimization_iters = config_.fit_opt_iters;
    params.seed = config_.seed;
    FitTrace trace;
    embedding_ = fit(points_, params, &trace);
    const auto t1 = Clock::now();

    pending_ = 0;
    t_ += 1;
    IterationMetrics m;
    m.t = t_;
    m.kld = trace.kl_final;
    if (config_.collect_timing) m.embed_ms = ms_between(t0, t1);
    m.anchors = points_.size();
    metrics_.record(m);
}

}  // namespace stsne
