#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "stsne/point.hpp"

namespace stsne {

struct IterationMetrics {
    std::int64_t t = 0;
    std::optional<double> kld;
    double embed_ms = 0.0;
    double pedrul_ms = 0.0;
    double hull_ms = 0.0;
    double ecs_ms = 0.0;
    std::size_t anchors = 0;
    std::size_t hull_vertices = 0;
    std::size_t cuts = 0;
};

/// Append-only per-iteration series with strictly increasing t.
class MetricsCollector {
public:
    void record(const IterationMetrics& m);
    const std::vector<IterationMetrics>& series() const { return series_; }

    /// Header: t,kld,embed_ms,pedrul_ms,hull_ms,ecs_ms,anchors,hull_vertices,cuts
    /// Absent KLD is an empty field.
    void write_csv(std::ostream& out) const;

private:
    std::vector<IterationMetrics> series_;
};

/// KL divergence between input-space affinities of the evaluation points and
/// the Student-t affinities of their embedded positions. Fewer than 4 points
/// yields no value.
std::optional<double> streaming_kld(const std::vector<HighDimPoint>& highs,
                                    const std::vector<Vec2>& lows, double perplexity);

}  // namespace stsne
