#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stsne/point.hpp"
#include "stsne/rng.hpp"

namespace stsne {

struct StreamItem {
    HighDimPoint point;
    std::optional<int> label;
};

/// Single-consumer forward iterator over a point source.
class PointStream {
public:
    virtual ~PointStream() = default;
    virtual std::optional<StreamItem> next() = 0;
};

/// One drifting 3-D Gaussian structure.
struct DriftStructureSpec {
    std::array<double, 3> mean{0.0, 0.0, 0.0};
    std::array<std::array<double, 3>, 3> covariance{{{1.0, 0.0, 0.0},
                                                     {0.0, 1.0, 0.0},
                                                     {0.0, 0.0, 1.0}}};
    std::array<double, 3> velocity{0.0, 0.0, 0.0};  // mean shift per tick
    double scale_rate = 1.0;                        // covariance scale per tick
    /// Alternate x rate / x (1/rate) per tick instead of compounding.
    bool oscillate = false;
};

/// Round-robin stream over three drifting Gaussians; the tick counter
/// advances every tick_every emitted points and applies mean velocity and
/// covariance scaling. Labels carry the structure index.
class SyntheticDriftStream : public PointStream {
public:
    SyntheticDriftStream(const std::array<DriftStructureSpec, 3>& specs, std::uint64_t total,
                         std::uint64_t seed, std::uint64_t tick_every = 300);
    std::optional<StreamItem> next() override;

    /// Two structures translating toward each other (crossing mid-run) and
    /// one stationary; all oscillate between contraction and dilation.
    static std::array<DriftStructureSpec, 3> default_specs();

private:
    struct StructureState {
        DriftStructureSpec spec;
        std::array<double, 3> mean;
        double scale = 1.0;
        std::array<std::array<double, 3>, 3> chol{};  // of covariance
    };
    void tick();

    std::array<StructureState, 3> structures_;
    std::uint64_t total_;
    std::uint64_t emitted_ = 0;
    std::uint64_t tick_every_;
    std::uint64_t ticks_ = 0;
    std::uint64_t next_id_ = 0;
    Rng rng_;
};

/// k isotropic Gaussian blobs with pairwise mean separation >= `separation`,
/// emitted round-robin. Labels carry the blob index.
class BlobStream : public PointStream {
public:
    BlobStream(std::size_t k, std::uint64_t n_per_cluster, double separation, std::size_t dim,
               std::uint64_t seed, double sigma = 1.0);
    std::optional<StreamItem> next() override;

private:
    std::vector<std::vector<double>> means_;
    std::uint64_t n_per_cluster_;
    std::size_t dim_;
    double sigma_;
    std::uint64_t emitted_ = 0;
    std::uint64_t next_id_ = 0;
    Rng rng_;
};

/// Streaming CSV reader: one point per line, comma separated, optional
/// header; a trailing label column exists when the header names its last
/// column "label". Constant memory; parse errors name the line.
class FileStream : public PointStream {
public:
    explicit FileStream(const std::string& path);
    std::optional<StreamItem> next() override;

private:
    std::ifstream in_;
    std::string path_;
    std::size_t line_no_ = 0;
    std::size_t dim_ = 0;  // 0 until the first data row fixes it
    bool has_label_ = false;
    bool header_checked_ = false;
    std::uint64_t next_id_ = 0;
};

}  // namespace stsne
