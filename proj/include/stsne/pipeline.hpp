#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stsne/clustering.hpp"
#include "stsne/ecs.hpp"
#include "stsne/metrics.hpp"
#include "stsne/point.hpp"

namespace stsne {

struct RunConfig {
    std::size_t batch_size = 400;
    std::size_t pedrul_budget = 400;
    std::optional<double> radius;  // nullopt: 0.25 x median pairwise of the opening slice
    double perplexity = 30.0;
    std::size_t fit_early_iters = 250;
    std::size_t fit_opt_iters = 400;
    std::size_t partial_iters = 100;
    DecayParams decay;
    std::size_t rings = 3;
    double cluster_eps = 2.0;
    std::size_t cluster_min_pts = 8;
    double slice_fraction = 0.2;
    std::uint64_t seed = 1;
    /// Expected stream length; sets the opening slice size to
    /// slice_fraction * expected_total. Unknown: the opening slice is one batch.
    std::optional<std::uint64_t> expected_total;
    bool collect_timing = true;
};

/// Throws ConfigError on invalid field combinations.
void validate_config(const RunConfig& config);

/// FNV-1a hash of the canonical config serialization (timing flag excluded).
std::uint64_t config_hash(const RunConfig& config);

struct ProjectionSnapshot {
    std::int64_t t = 0;
    std::uint64_t config_hash = 0;
    std::vector<std::vector<Vec2>> hulls;  // CCW vertex loops, by polygon id
    std::vector<LowDimPoint> anchors;      // ascending id
    std::vector<CutRecord> cuts;           // cuts of this iteration
};

/// The streaming state machine: accumulate points, project a batch when the
/// trigger size is reached, refresh representatives and hulls, apply the
/// forgetting pass, prune stray representatives.
class Pipeline {
public:
    explicit Pipeline(const RunConfig& config);

    /// Returns true when this point triggered a projection. Dimension
    /// mismatches are rejected into error_log(); the stream continues.
    bool ingest(const HighDimPoint& point);

    /// Project whatever is left in storage (smaller than a full batch).
    /// Returns true if a projection ran.
    bool finish();

    std::int64_t iterations() const { return t_; }
    const AnchorSet& anchors() const { return anchors_; }
    /// Cluster label of each anchor at the last projection (index-aligned
    /// with anchors(); kNoise for noise).
    const std::vector<int>& anchor_clusters() const { return anchor_clusters_; }
    const std::vector<TrackedHull>& hulls() const { return hulls_; }
    std::size_t storage_size() const { return storage_.size(); }
    double resolved_radius() const { return resolved_radius_; }

    ProjectionSnapshot snapshot() const;
    const MetricsCollector& metrics() const { return metrics_; }
    const std::vector<CutRecord>& cut_log() const { return cut_log_; }
    const std::vector<std::string>& error_log() const { return error_log_; }

private:
    void project_batch();
    std::size_t opening_size() const;

    RunConfig config_;
    std::uint64_t config_hash_ = 0;
    std::int64_t t_ = 0;
    std::vector<HighDimPoint> storage_;
    AnchorSet anchors_;
    std::vector<int> anchor_clusters_;
    std::vector<TrackedHull> hulls_;
    std::vector<CutRecord> cut_log_;
    std::vector<CutRecord> cuts_last_iter_;
    MetricsCollector metrics_;
    std::vector<std::string> error_log_;
    double resolved_radius_ = 0.0;
    std::uint64_t next_hull_id_ = 0;
    std::size_t dim_ = 0;  // fixed by the first accepted point
};

/// Full-refit-per-batch reference runner: accumulates every point seen and
/// reruns the complete embedding at each trigger. Refuses streams longer
/// than `cap` points.
class BaselineRunner {
public:
    BaselineRunner(const RunConfig& config, std::size_t cap = 20000);

    bool ingest(const HighDimPoint& point);
    bool finish();

    std::int64_t iterations() const { return t_; }
    std::size_t stored() const { return points_.size(); }
    const std::vector<LowDimPoint>& embedding() const { return embedding_; }
    const MetricsCollector& metrics() const { return metrics_; }

private:
    void reproject();
    std::size_t opening_size() const;

    RunConfig config_;
    std::size_t cap_;
    std::int64_t t_ = 0;
    std::size_t pending_ = 0;  // points since the last projection
    std::vector<HighDimPoint> points_;
    std::vector<LowDimPoint> embedding_;
    MetricsCollector metrics_;
};

}  // namespace stsne
