#include "stsne/partial_embed.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <string>

#include "stsne/errors.hpp"
#include "stsne/tsne.hpp"

namespace stsne {

Matrix cross_affinities(const std::vector<HighDimPoint>& batch, const AnchorSet& anchors,
                        double perplexity) {
    if (anchors.empty())
        throw StateError("cross_affinities: no anchors; run a full fit first");
    const std::size_t a = anchors.size();
    if (a < 2) throw ConfigError("cross_affinities: need at least 2 anchors");
    if (batch.empty()) throw DataError("cross_affinities: empty batch");
    const std::size_t dim = anchors.high[0].coords.size();
    for (const auto& pt : batch)
        if (pt.coords.size() != dim) throw ConfigError("cross_affinities: dimension mismatch");

    double perp = perplexity;
    const double cap = static_cast<double>(a - 1);
    if (perp > cap) {
        std::clog << "warning: perplexity " << perp << " clamped to " << cap
                  << " (anchor count " << a << ")\n";
        perp = cap;
    }

    const std::size_t b = batch.size();
    Matrix cross(b, a, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(b); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        std::vector<double> d2(a, 0.0);
        for (std::size_t k = 0; k < a; ++k) {
            double s = 0.0;
            for (std::size_t c = 0; c < dim; ++c) {
                const double diff = batch[i].coords[c] - anchors.high[k].coords[c];
                s += diff * diff;
            }
            d2[k] = s;
        }
        const RowCalibration cal = calibrate_row(d2, perp);
        std::copy(cal.probs.begin(), cal.probs.end(), cross.row(i));
    }
    return cross;
}

std::vector<LowDimPoint> init_positions(const Matrix& cross, const AnchorSet& anchors,
                                        const std::vector<HighDimPoint>& batch) {
    if (cross.cols() != anchors.size() || cross.rows() != batch.size())
        throw ConfigError("init_positions: shape mismatch");
    std::vector<LowDimPoint> out(cross.rows());
    for (std::size_t i = 0; i < cross.rows(); ++i) {
        Vec2 pos{0.0, 0.0};
        for (std::size_t k = 0; k < cross.cols(); ++k)
            pos = pos + anchors.low[k].pos * cross(i, k);
        out[i] = {batch[i].id, pos};
    }
    return out;
}

namespace {

// Z of the bipartite Student-t kernel, summed in row order.
double bipartite_z(const std::vector<LowDimPoint>& batch_low, const AnchorSet& anchors) {
    double z = 0.0;
    for (const auto& bp : batch_low)
        for (const auto& ap : anchors.low) z += 1.0 / (1.0 + sq_norm(bp.pos - ap.pos));
    return z;
}

}  // namespace

double partial_kl(const std::vector<LowDimPoint>& batch_low, const AnchorSet& anchors,
                  const Matrix& cross) {
    const std::size_t b = batch_low.size();
    const std::size_t a = anchors.size();
    if (cross.rows() != b || cross.cols() != a) throw ConfigError("partial_kl: shape mismatch");
    const double z = bipartite_z(batch_low, anchors);
    const double inv_b = 1.0 / static_cast<double>(b);
    double kl = 0.0;
    for (std::size_t i = 0; i < b; ++i)
        for (std::size_t k = 0; k < a; ++k) {
            const double pik = cross(i, k) * inv_b;
            if (pik <= 0.0) continue;
            const double w = 1.0 / (1.0 + sq_norm(batch_low[i].pos - anchors.low[k].pos));
            const double qik = std::max(w / z, 1e-12);
            kl += pik * std::log(pik / qik);
        }
    return kl < 0.0 ? 0.0 : kl;
}

std::vector<LowDimPoint> optimize_partial(const std::vector<LowDimPoint>& init,
                                          const AnchorSet& anchors, const Matrix& cross,
                                          const PartialParams& params, PartialTrace* trace) {
    const std::size_t b = init.size();
    const std::size_t a = anchors.size();
    if (cross.rows() != b || cross.cols() != a)
        throw ConfigError("optimize_partial: shape mismatch");
    if (anchors.empty()) throw StateError("optimize_partial: no anchors");

    std::vector<LowDimPoint> y = init;
    if (trace) trace->kl_initial = partial_kl(y, anchors, cross);

    const double inv_b = 1.0 / static_cast<double>(b);
    std::vector<double> row_sums(b, 0.0);
    std::vector<Vec2> grad(b);

    for (std::size_t iter = 0; iter < params.iters; ++iter) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(b); ++ii) {
            const auto i = static_cast<std::size_t>(ii);
            double s = 0.0;
            for (std::size_t k = 0; k < a; ++k)
                s += 1.0 / (1.0 + sq_norm(y[i].pos - anchors.low[k].pos));
            row_sums[i] = s;
        }
        double z = 0.0;
        for (std::size_t i = 0; i < b; ++i) z += row_sums[i];
        const double inv_z = 1.0 / z;

#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(b); ++ii) {
            const auto i = static_cast<std::size_t>(ii);
            double gx = 0.0;
            double gy = 0.0;
            for (std::size_t k = 0; k < a; ++k) {
                const Vec2 diff = y[i].pos - anchors.low[k].pos;
                const double w = 1.0 / (1.0 + sq_norm(diff));
                const double mult = (cross(i, k) * inv_b - w * inv_z) * w;
                gx += mult * diff.x;
                gy += mult * diff.y;
            }
            grad[i] = {2.0 * gx, 2.0 * gy};
        }

        bool finite = true;
        for (std::size_t i = 0; i < b; ++i) {
            y[i].pos.x -= params.learning_rate * grad[i].x;
            y[i].pos.y -= params.learning_rate * grad[i].y;
            finite = finite && std::isfinite(y[i].pos.x) && std::isfinite(y[i].pos.y);
        }
        if (!finite)
            throw DivergenceError("optimize_partial: diverged at iteration " +
                                  std::to_string(iter));
    }
    if (trace) trace->kl_final = partial_kl(y, anchors, cross);
    return y;
}

}  // namespace stsne
