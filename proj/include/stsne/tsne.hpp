#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stsne/matrix.hpp"
#include "stsne/point.hpp"

namespace stsne {

/// Sentinel for calibrate_row when the row has no self entry.
inline constexpr std::size_t kNoSelf = static_cast<std::size_t>(-1);

struct RowCalibration {
    double beta = 1.0;
    /// Same length as the input row; the self entry (if any) is 0 and the
    /// rest sums to 1.
    std::vector<double> probs;
};

/// Binary search on the Gaussian precision beta so that the conditional
/// distribution over the row reaches the target perplexity (2^H within
/// 1e-5 relative), capped at 50 bisection steps.
RowCalibration calibrate_row(std::span<const double> sq_dists, double perplexity,
                             std::size_t self_index = kNoSelf);

Matrix pairwise_sq_dists(const std::vector<HighDimPoint>& points);

/// Symmetrized joint affinities p_ij = (p_j|i + p_i|j) / (2n).
Matrix joint_affinities(const std::vector<HighDimPoint>& points, double perplexity);

/// Student-t joint affinities q_ij proportional to (1 + |y_i - y_j|^2)^-1.
Matrix low_dim_affinities(std::span<const Vec2> ys);
Matrix low_dim_affinities(const std::vector<LowDimPoint>& ys);

/// KL(P || Q) in nats; Q entries clamped below at 1e-12 before the log.
double kl_divergence(const Matrix& p, const Matrix& q);

/// Analytic gradient of kl_divergence(P, low_dim_affinities(Y)) w.r.t. Y:
/// grad_i = 4 sum_j (p_ij - q_ij) (y_i - y_j) / (1 + |y_i - y_j|^2).
std::vector<Vec2> kl_gradient(const Matrix& p, std::span<const Vec2> ys);

struct TsneParams {
    double perplexity = 30.0;
    std::size_t early_exaggeration_iters = 250;
    std::size_t optimization_iters = 400;
    double exaggeration_factor = 12.0;
    double learning_rate = 200.0;
    double momentum_early = 0.5;
    double momentum_late = 0.8;
    std::uint64_t seed = 0;
};

/// Objective values observed during fit, for convergence checks.
struct FitTrace {
    double kl_at_exaggeration_removal = 0.0;
    double kl_final = 0.0;
};

/// Full batch t-SNE. Deterministic for a fixed seed. Throws DivergenceError
/// (naming the iteration) if the embedding leaves the finite range.
std::vector<LowDimPoint> fit(const std::vector<HighDimPoint>& points, const TsneParams& params,
                             FitTrace* trace = nullptr);

}  // namespace stsne
