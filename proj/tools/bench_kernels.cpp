// Timing harness: OpenMP kernels against their serial reference twins.
// Prints wall time per side and the largest observed disagreement.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "stsne/clustering.hpp"
#include "stsne/kdtree.hpp"
#include "stsne/matrix.hpp"
#include "stsne/pedrul.hpp"
#include "stsne/point.hpp"
#include "stsne/reference.hpp"
#include "stsne/rng.hpp"
#include "stsne/tsne.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double time_ms(F&& f) {
    const auto start = Clock::now();
    f();
    const auto end = Clock::now();
    return std::chrono::duration<double, std::milli>(end - start).count();
}

std::vector<stsne::HighDimPoint> random_points(std::size_t n, std::size_t dim,
                                               stsne::Rng& rng) {
    std::vector<stsne::HighDimPoint> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i].id = i;
        pts[i].coords.resize(dim);
        for (auto& c : pts[i].coords) c = rng.gaussian();
    }
    return pts;
}

std::vector<stsne::Vec2> random_embedding(std::size_t n, stsne::Rng& rng) {
    std::vector<stsne::Vec2> ys(n);
    for (auto& y : ys) y = {rng.gaussian(0.0, 3.0), rng.gaussian(0.0, 3.0)};
    return ys;
}

double max_abs_diff(const stsne::Matrix& a, const stsne::Matrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

void report(const char* name, double par_ms, double ser_ms, double diff) {
    std::printf("%-22s parallel %9.2f ms   serial %9.2f ms   x%.2f   max|diff| %.3g\n", name,
                par_ms, ser_ms, par_ms > 0.0 ? ser_ms / par_ms : 0.0, diff);
}

}  // namespace

int main() {
    stsne::Rng rng(42);

    {
        const auto pts = random_points(1500, 20, rng);
        stsne::Matrix par, ser;
        const double tp = time_ms([&] { par = stsne::pairwise_sq_dists(pts); });
        const double ts = time_ms([&] { ser = stsne::ref::pairwise_sq_dists(pts); });
        report("pairwise_sq_dists", tp, ts, max_abs_diff(par, ser));
    }
    {
        const auto pts = random_points(800, 20, rng);
        stsne::Matrix par, ser;
        const double tp = time_ms([&] { par = stsne::joint_affinities(pts, 30.0); });
        const double ts = time_ms([&] { ser = stsne::ref::joint_affinities(pts, 30.0); });
        report("joint_affinities", tp, ts, max_abs_diff(par, ser));
    }
    {
        const auto ys = random_embedding(3000, rng);
        stsne::Matrix par, ser;
        const double tp = time_ms([&] { par = stsne::low_dim_affinities(ys); });
        const double ts = time_ms([&] { ser = stsne::ref::low_dim_affinities(ys); });
        report("low_dim_affinities", tp, ts, max_abs_diff(par, ser));

        double kp = 0.0, ks = 0.0;
        const double tkp = time_ms([&] { kp = stsne::kl_divergence(par, par); });
        const double tks = time_ms([&] { ks = stsne::ref::kl_divergence(par, par); });
        report("kl_divergence", tkp, tks, std::abs(kp - ks));
    }
    {
        const auto pts = random_points(1200, 10, rng);
        const auto ys = random_embedding(1200, rng);
        const auto p = stsne::joint_affinities(pts, 30.0);
        std::vector<stsne::Vec2> gp, gs;
        const double tp = time_ms([&] { gp = stsne::kl_gradient(p, ys); });
        const double ts = time_ms([&] { gs = stsne::ref::kl_gradient(p, ys); });
        double diff = 0.0;
        for (std::size_t i = 0; i < gp.size(); ++i)
            diff = std::max(diff, std::max(std::abs(gp[i].x - gs[i].x),
                                           std::abs(gp[i].y - gs[i].y)));
        report("kl_gradient", tp, ts, diff);
    }
    {
        const auto pts = random_points(8000, 8, rng);
        const double r = 2.0;
        std::size_t mismatches = 0;
        std::size_t total = 0;
        double tp = 0.0, ts = 0.0;
        const stsne::KdTree tree(pts);
        tp = time_ms([&] {
            for (const auto& q : pts) total += tree.radius_neighbors(q, r).size();
        });
        ts = time_ms([&] {
            for (const auto& q : pts) {
                const auto brute = stsne::ref::radius_neighbors_bruteforce(pts, q, r);
                if (brute != tree.radius_neighbors(q, r)) ++mismatches;
            }
        });
        report("radius_neighbors", tp, ts, static_cast<double>(mismatches));
        std::printf("%-22s %zu neighbor pairs found\n", "", total);
    }
    {
        const auto pts = random_points(3000, 8, rng);
        stsne::PedrulSelection par, ser;
        const double tp = time_ms([&] { par = stsne::select_pedrul(pts, 2.0, 400); });
        const double ts = time_ms([&] { ser = stsne::ref::select_pedrul_quadratic(pts, 2.0, 400); });
        report("select_pedrul", tp, ts, par.chosen == ser.chosen ? 0.0 : 1.0);
    }
    {
        auto ys = random_embedding(4000, rng);
        std::vector<stsne::LowDimPoint> pts(ys.size());
        for (std::size_t i = 0; i < ys.size(); ++i) pts[i] = {i, ys[i] * 0.4};
        stsne::ClusterLabels par, ser;
        const double tp = time_ms([&] { par = stsne::cluster_embedding(pts, 0.25, 8); });
        const double ts = time_ms([&] { ser = stsne::ref::dbscan_quadratic(pts, 0.25, 8); });
        report("dbscan", tp, ts, par.labels == ser.labels ? 0.0 : 1.0);
        std::printf("%-22s %d clusters\n", "", par.cluster_count);
    }
    return 0;
}
