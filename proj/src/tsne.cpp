#include "stsne/tsne.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <string>

#include "stsne/errors.hpp"
#include "stsne/rng.hpp"

namespace stsne {
namespace {

// Entropy (bits) of the normalized kernel exp(-beta * d) over the candidate
// entries of a row, plus the normalized probabilities. Distances are shifted
// by their minimum so the exponentials stay in range for any beta.
double row_entropy_bits(std::span<const double> sq_dists, std::size_t self_index, double beta,
                        std::vector<double>& probs_out) {
    const std::size_t n = sq_dists.size();
    probs_out.assign(n, 0.0);
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        if (j == self_index) continue;
        dmin = std::min(dmin, sq_dists[j]);
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == self_index) continue;
        const double w = std::exp(-beta * (sq_dists[j] - dmin));
        probs_out[j] = w;
        sum += w;
    }
    double h = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == self_index) continue;
        const double p = probs_out[j] / sum;
        probs_out[j] = p;
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

}  // namespace

RowCalibration calibrate_row(std::span<const double> sq_dists, double perplexity,
                             std::size_t self_index) {
    if (perplexity < 1.0) throw ConfigError("calibrate_row: perplexity must be >= 1");
    std::size_t candidates = 0;
    bool all_zero = true;
    for (std::size_t j = 0; j < sq_dists.size(); ++j) {
        if (j == self_index) continue;
        if (!std::isfinite(sq_dists[j])) throw ConfigError("calibrate_row: non-finite distance");
        ++candidates;
        if (sq_dists[j] != 0.0) all_zero = false;
    }
    if (candidates == 0) throw ConfigError("calibrate_row: no candidate entries");

    RowCalibration out;
    if (all_zero) {
        // Degenerate row: every candidate coincides with the query. The
        // kernel is uniform for any beta, so fall back to the uniform
        // distribution explicitly.
        std::clog << "warning: degenerate distance row, uniform fallback\n";
        out.beta = 1.0;
        out.probs.assign(sq_dists.size(), 0.0);
        for (std::size_t j = 0; j < sq_dists.size(); ++j)
            if (j != self_index) out.probs[j] = 1.0 / static_cast<double>(candidates);
        return out;
    }

    const double target = perplexity;
    const double tol = 1e-5 * target;
    double beta = 1.0;
    double beta_lo = -std::numeric_limits<double>::infinity();
    double beta_hi = std::numeric_limits<double>::infinity();
    std::vector<double> probs;
    double best_beta = beta;
    double best_diff = std::numeric_limits<double>::infinity();

    for (int step = 0; step < 50; ++step) {
        const double h = row_entropy_bits(sq_dists, self_index, beta, probs);
        const double perp_now = std::exp2(h);
        const double diff = std::abs(perp_now - target);
        if (diff < best_diff) {
            best_diff = diff;
            best_beta = beta;
            out.probs = probs;
        }
        if (diff <= tol) break;
        if (perp_now > target) {
            // Too spread out: sharpen the kernel.
            beta_lo = beta;
            beta = std::isinf(beta_hi) ? beta * 2.0 : 0.5 * (beta + beta_hi);
        } else {
            beta_hi = beta;
            beta = std::isinf(beta_lo) ? beta * 0.5 : 0.5 * (beta + beta_lo);
        }
    }
    out.beta = best_beta;
    return out;
}

Matrix pairwise_sq_dists(const std::vector<HighDimPoint>& points) {
    const std::size_t n = points.size();
    if (n < 2) throw ConfigError("pairwise_sq_dists: need at least 2 points");
    const std::size_t d = points[0].coords.size();
    for (const auto& p : points)
        if (p.coords.size() != d) throw ConfigError("pairwise_sq_dists: dimension mismatch");

    Matrix out(n, n, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const double* a = points[i].coords.data();
        for (std::size_t j = i + 1; j < n; ++j) {
            const double* b = points[j].coords.data();
            double s = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
                const double diff = a[k] - b[k];
                s += diff * diff;
            }
            out(i, j) = s;
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) out(j, i) = out(i, j);
    return out;
}

Matrix joint_affinities(const std::vector<HighDimPoint>& points, double perplexity) {
    const std::size_t n = points.size();
    if (n < 3) throw ConfigError("joint_affinities: need at least 3 points");
    const Matrix d2 = pairwise_sq_dists(points);

    Matrix cond(n, n, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const RowCalibration cal =
            calibrate_row(std::span<const double>(d2.row(i), n), perplexity, i);
        std::copy(cal.probs.begin(), cal.probs.end(), cond.row(i));
    }

    Matrix p(n, n, 0.0);
    const double scale = 1.0 / (2.0 * static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = (cond(i, j) + cond(j, i)) * scale;
            p(i, j) = v;
            p(j, i) = v;
        }
    }
    return p;
}

Matrix low_dim_affinities(std::span<const Vec2> ys) {
    const std::size_t n = ys.size();
    if (n < 2) throw ConfigError("low_dim_affinities: need at least 2 points");

    Matrix w(n, n, 0.0);
    std::vector<double> row_sums(n, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double v = 1.0 / (1.0 + sq_norm(ys[i] - ys[j]));
            w(i, j) = v;
            s += v;
        }
        row_sums[i] = s;
    }
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) z += row_sums[i];

    const double inv_z = 1.0 / z;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double q = w(i, j) * inv_z;
            w(i, j) = q;
            w(j, i) = q;
        }
    return w;
}

Matrix low_dim_affinities(const std::vector<LowDimPoint>& ys) {
    std::vector<Vec2> pos(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) pos[i] = ys[i].pos;
    return low_dim_affinities(std::span<const Vec2>(pos));
}

double kl_divergence(const Matrix& p, const Matrix& q) {
    if (p.rows() != q.rows() || p.cols() != q.cols() || p.rows() != p.cols())
        throw ConfigError("kl_divergence: size mismatch");
    const std::size_t n = p.rows();
    std::vector<double> partial(n, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double pij = p(i, j);
            if (pij <= 0.0) continue;
            const double qij = std::max(q(i, j), 1e-12);
            s += pij * std::log(pij / qij);
        }
        partial[i] = s;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += partial[i];
    return total < 0.0 ? 0.0 : total;
}

namespace {

// Fused two-pass exact gradient. p_scale multiplies P on the fly (early
// exaggeration) so the stored matrix never needs rescaling.
void gradient_into(const Matrix& p, double p_scale, std::span<const Vec2> ys,
                   std::vector<Vec2>& grad, std::vector<double>& row_sums) {
    const std::size_t n = ys.size();
    grad.resize(n);
    row_sums.resize(n);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            s += 1.0 / (1.0 + sq_norm(ys[i] - ys[j]));
        }
        row_sums[i] = s;
    }
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) z += row_sums[i];
    const double inv_z = 1.0 / z;

#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        double gx = 0.0;
        double gy = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const Vec2 diff = ys[i] - ys[j];
            const double w = 1.0 / (1.0 + sq_norm(diff));
            const double mult = (p_scale * p(i, j) - w * inv_z) * w;
            gx += mult * diff.x;
            gy += mult * diff.y;
        }
        grad[i] = {4.0 * gx, 4.0 * gy};
    }
}

}  // namespace

std::vector<Vec2> kl_gradient(const Matrix& p, std::span<const Vec2> ys) {
    if (p.rows() != ys.size() || p.rows() != p.cols())
        throw ConfigError("kl_gradient: size mismatch");
    std::vector<Vec2> grad;
    std::vector<double> row_sums;
    gradient_into(p, 1.0, ys, grad, row_sums);
    return grad;
}

std::vector<LowDimPoint> fit(const std::vector<HighDimPoint>& points, const TsneParams& params,
                             FitTrace* trace) {
    const std::size_t n = points.size();
    if (n < 4) throw ConfigError("fit: need at least 4 points");
    if (!(params.perplexity < static_cast<double>(n - 1)))
        throw ConfigError("fit: perplexity must be below n-1");
    for (const auto& pt : points)
        for (double c : pt.coords)
            if (!std::isfinite(c)) throw DataError("fit: non-finite input coordinate");

    const Matrix p = joint_affinities(points, params.perplexity);

    Rng rng(params.seed);
    std::vector<Vec2> y(n);
    for (auto& v : y) {
        v.x = rng.gaussian(0.0, 1e-2);
        v.y = rng.gaussian(0.0, 1e-2);
    }
    std::vector<Vec2> velocity(n, Vec2{0.0, 0.0});
    std::vector<Vec2> grad;
    std::vector<double> scratch;

    const std::size_t e_iters = params.early_exaggeration_iters;
    const std::size_t total = e_iters + params.optimization_iters;
    const bool exaggerate = e_iters > 0 && params.exaggeration_factor != 1.0;

    if (trace && e_iters == 0)
        trace->kl_at_exaggeration_removal = kl_divergence(p, low_dim_affinities(y));

    for (std::size_t iter = 0; iter < total; ++iter) {
        if (trace && e_iters > 0 && iter == e_iters)
            trace->kl_at_exaggeration_removal = kl_divergence(p, low_dim_affinities(y));
        const double p_scale = (exaggerate && iter < e_iters) ? params.exaggeration_factor : 1.0;
        const double momentum = iter < e_iters ? params.momentum_early : params.momentum_late;

        gradient_into(p, p_scale, y, grad, scratch);
        double mean_x = 0.0;
        double mean_y = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            velocity[i].x = momentum * velocity[i].x - params.learning_rate * grad[i].x;
            velocity[i].y = momentum * velocity[i].y - params.learning_rate * grad[i].y;
            y[i].x += velocity[i].x;
            y[i].y += velocity[i].y;
            mean_x += y[i].x;
            mean_y += y[i].y;
        }
        mean_x /= static_cast<double>(n);
        mean_y /= static_cast<double>(n);
        bool finite = true;
        for (std::size_t i = 0; i < n; ++i) {
            y[i].x -= mean_x;
            y[i].y -= mean_y;
            finite = finite && std::isfinite(y[i].x) && std::isfinite(y[i].y);
        }
        if (!finite)
            throw DivergenceError("fit: embedding diverged at iteration " + std::to_string(iter));
    }
    if (trace && e_iters > 0 && total <= e_iters)
        trace->kl_at_exaggeration_removal = kl_divergence(p, low_dim_affinities(y));
    if (trace) trace->kl_final = kl_divergence(p, low_dim_affinities(y));

    std::vector<LowDimPoint> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = {points[i].id, y[i]};
    return out;
}

}  // namespace stsne
