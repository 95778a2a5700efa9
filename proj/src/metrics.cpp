#include "stsne/metrics.hpp"

#include <cstdio>

#include "stsne/errors.hpp"
#include "stsne/tsne.hpp"

namespace stsne {

void MetricsCollector::record(const IterationMetrics& m) {
    if (!series_.empty() && m.t <= series_.back().t)
        throw ContractError("MetricsCollector: t must be strictly increasing");
    series_.push_back(m);
}

namespace {

std::string fmt_double(double v, const char* spec) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

}  // namespace

void MetricsCollector::write_csv(std::ostream& out) const {
    out << "t,kld,embed_ms,pedrul_ms,hull_ms,ecs_ms,anchors,hull_vertices,cuts\n";
    for (const auto& m : series_) {
        out << m.t << ',';
        if (m.kld) out << fmt_double(*m.kld, "%.17g");
        out << ',' << fmt_double(m.embed_ms, "%.3f") << ',' << fmt_double(m.pedrul_ms, "%.3f")
            << ',' << fmt_double(m.hull_ms, "%.3f") << ',' << fmt_double(m.ecs_ms, "%.3f")
            << ',' << m.anchors << ',' << m.hull_vertices << ',' << m.cuts << '\n';
    }
}

std::optional<double> streaming_kld(const std::vector<HighDimPoint>& highs,
                                    const std::vector<Vec2>& lows, double perplexity) {
    if (highs.size() != lows.size()) throw ConfigError("streaming_kld: size mismatch");
    if (highs.size() < 4) return std::nullopt;
    const Matrix p = joint_affinities(highs, perplexity);
    const Matrix q = low_dim_affinities(std::span<const Vec2>(lows));
    return kl_divergence(p, q);
}

}  // namespace stsne
