#pragma once

#include <cstddef>
#include <vector>

#include "stsne/matrix.hpp"
#include "stsne/point.hpp"

namespace stsne {

/// Row-stochastic B x A matrix of conditional affinities from each batch
/// point to the anchors. No batch-batch terms. Perplexity above A-1 is
/// clamped with a warning on std::clog.
Matrix cross_affinities(const std::vector<HighDimPoint>& batch, const AnchorSet& anchors,
                        double perplexity);

/// Initialize each batch point at the affinity-weighted mean of anchor
/// positions.
std::vector<LowDimPoint> init_positions(const Matrix& cross, const AnchorSet& anchors,
                                        const std::vector<HighDimPoint>& batch);

struct PartialParams {
    std::size_t iters = 100;
    double learning_rate = 200.0;
};

/// Trace of the bipartite KL objective for convergence checks.
struct PartialTrace {
    double kl_initial = 0.0;
    double kl_final = 0.0;
};

/// Gradient descent on the batch positions with anchors frozen. P is the
/// cross matrix normalized jointly (divided by B); Q is the Student-t kernel
/// over batch-anchor pairs only.
std::vector<LowDimPoint> optimize_partial(const std::vector<LowDimPoint>& init,
                                          const AnchorSet& anchors, const Matrix& cross,
                                          const PartialParams& params,
                                          PartialTrace* trace = nullptr);

/// The bipartite objective itself, exposed for tests.
double partial_kl(const std::vector<LowDimPoint>& batch_low, const AnchorSet& anchors,
                  const Matrix& cross);

}  // namespace stsne
