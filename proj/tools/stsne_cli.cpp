#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stsne/errors.hpp"
#include "stsne/metrics.hpp"
#include "stsne/pipeline.hpp"
#include "stsne/snapshot.hpp"
#include "stsne/streamgen.hpp"

namespace {

struct CliOptions {
    std::string input;
    bool synthetic_drift = false;
    std::size_t blobs = 0;
    std::uint64_t total = 0;
    bool total_set = false;
    std::size_t batch_size = 400;
    std::size_t pedrul = 400;
    std::string radius = "auto";
    double perplexity = 30.0;
    std::vector<std::size_t> fit_iters{250, 400};
    std::size_t partial_iters = 100;
    double alpha = 0.88;
    double beta = 1.6;
    double eta = 0.01;
    std::size_t rings = 3;
    double cluster_eps = 2.0;
    std::size_t cluster_minpts = 8;
    double slice = 0.2;
    std::uint64_t seed = 1;
    std::string out = "out";
    std::size_t snapshot_every = 1;
    bool no_timing = false;
    std::size_t baseline_cap = 20000;
};

void add_common_flags(CLI::App* cmd, CliOptions& o) {
    auto* input = cmd->add_option("--input", o.input, "CSV file to stream (one point per row)");
    auto* drift = cmd->add_flag("--synthetic-drift", o.synthetic_drift,
                                "three drifting 3-D Gaussians, two crossing mid-run");
    auto* blobs = cmd->add_option("--blobs", o.blobs,
                                  "K stationary well-separated Gaussian blobs (50-D)");
    input->excludes(drift)->excludes(blobs);
    drift->excludes(blobs);

    cmd->add_option("--total", o.total, "points to emit (required for synthetic sources)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--batch-size", o.batch_size, "points per projection trigger")
        ->capture_default_str();
    cmd->add_option("--pedrul", o.pedrul, "representative budget D")->capture_default_str();
    cmd->add_option("--radius", o.radius,
                    "representative radius R, or 'auto' (0.25 x median pairwise "
                    "distance of the opening slice)")
        ->capture_default_str();
    cmd->add_option("--perplexity", o.perplexity, "t-SNE perplexity")->capture_default_str();
    cmd->add_option("--fit-iters", o.fit_iters,
                    "opening fit iterations as E,O (early exaggeration, post)")
        ->delimiter(',')
        ->expected(1, 2);
    cmd->add_option("--partial-iters", o.partial_iters, "gradient steps per projected batch")
        ->capture_default_str();
    cmd->add_option("--alpha", o.alpha, "decay amplitude")->capture_default_str();
    cmd->add_option("--beta", o.beta, "decay offset")->capture_default_str();
    cmd->add_option("--eta", o.eta, "decay rate")->capture_default_str();
    cmd->add_option("--rings", o.rings, "cobweb rings per hull")->capture_default_str();
    cmd->add_option("--cluster-eps", o.cluster_eps, "DBSCAN radius in embedding units")
        ->capture_default_str();
    cmd->add_option("--cluster-minpts", o.cluster_minpts, "DBSCAN core threshold")
        ->capture_default_str();
    cmd->add_option("--slice", o.slice, "fraction of the stream before the opening fit")
        ->capture_default_str();
    cmd->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
    cmd->add_option("--out", o.out, "output directory")->capture_default_str();
    cmd->add_option("--snapshot-every", o.snapshot_every,
                    "write snapshot_{t}.json every K projections (0: never)")
        ->capture_default_str();
    cmd->add_flag("--no-timing", o.no_timing,
                  "zero the *_ms metrics columns for byte-reproducible output");
}

std::unique_ptr<stsne::PointStream> make_stream(const CliOptions& o) {
    if (!o.input.empty()) return std::make_unique<stsne::FileStream>(o.input);
    if (o.synthetic_drift) {
        if (!o.total_set)
            throw stsne::ConfigError("--synthetic-drift requires --total");
        return std::make_unique<stsne::SyntheticDriftStream>(
            stsne::SyntheticDriftStream::default_specs(), o.total, o.seed);
    }
    if (o.blobs > 0) {
        if (!o.total_set) throw stsne::ConfigError("--blobs requires --total");
        const std::uint64_t per = o.total / o.blobs;
        if (per == 0) throw stsne::ConfigError("--total must be >= --blobs");
        return std::make_unique<stsne::BlobStream>(o.blobs, per, 30.0, 50, o.seed);
    }
    throw stsne::ConfigError("pick a source: --input, --synthetic-drift or --blobs");
}

stsne::RunConfig make_config(const CliOptions& o) {
    stsne::RunConfig cfg;
    cfg.batch_size = o.batch_size;
    cfg.pedrul_budget = o.pedrul;
    if (o.radius != "auto") {
        try {
            std::size_t used = 0;
            const double r = std::stod(o.radius, &used);
            if (used != o.radius.size()) throw std::invalid_argument(o.radius);
            cfg.radius = r;
        } catch (const std::exception&) {
            throw stsne::ConfigError("--radius expects a number or 'auto', got '" + o.radius +
                                     "'");
        }
    }
    cfg.perplexity = o.perplexity;
    cfg.fit_early_iters = o.fit_iters.at(0);
    cfg.fit_opt_iters = o.fit_iters.size() > 1 ? o.fit_iters[1] : o.fit_iters[0];
    cfg.partial_iters = o.partial_iters;
    cfg.decay = {o.alpha, o.beta, o.eta};
    cfg.rings = o.rings;
    cfg.cluster_eps = o.cluster_eps;
    cfg.cluster_min_pts = o.cluster_minpts;
    cfg.slice_fraction = o.slice;
    cfg.seed = o.seed;
    if (o.total_set) cfg.expected_total = o.total;
    cfg.collect_timing = !o.no_timing;
    return cfg;
}

void write_metrics(const std::string& dir, const stsne::MetricsCollector& metrics) {
    const auto path = std::filesystem::path(dir) / "metrics.csv";
    std::ofstream out(path);
    if (!out) throw stsne::DataError("cannot write " + path.string());
    metrics.write_csv(out);
}

void maybe_snapshot(const CliOptions& o, const stsne::Pipeline& pipeline) {
    if (o.snapshot_every == 0) return;
    const auto t = pipeline.iterations();
    if (static_cast<std::size_t>(t) % o.snapshot_every != 0) return;
    const auto path =
        std::filesystem::path(o.out) / ("snapshot_" + std::to_string(t) + ".json");
    stsne::write_snapshot_file(path.string(), pipeline.snapshot());
}

int run_pipeline(const CliOptions& o) {
    auto stream = make_stream(o);
    stsne::Pipeline pipeline(make_config(o));
    std::filesystem::create_directories(o.out);

    while (auto item = stream->next()) {
        if (pipeline.ingest(item->point)) maybe_snapshot(o, pipeline);
    }
    if (pipeline.finish()) maybe_snapshot(o, pipeline);

    for (const auto& err : pipeline.error_log()) std::cerr << "warning: " << err << "\n";
    write_metrics(o.out, pipeline.metrics());

    const auto& series = pipeline.metrics().series();
    std::cout << "projections: " << pipeline.iterations()
              << "  anchors: " << pipeline.anchors().size()
              << "  hulls: " << pipeline.hulls().size() << "  cuts: " << pipeline.cut_log().size();
    if (!series.empty() && series.back().kld) std::cout << "  kld: " << *series.back().kld;
    std::cout << "\n";
    return 0;
}

int run_baseline(const CliOptions& o) {
    auto stream = make_stream(o);
    stsne::BaselineRunner runner(make_config(o), o.baseline_cap);
    std::filesystem::create_directories(o.out);

    while (auto item = stream->next()) runner.ingest(item->point);
    runner.finish();

    write_metrics(o.out, runner.metrics());
    const auto& series = runner.metrics().series();
    std::cout << "projections: " << runner.iterations() << "  retained: " << runner.stored();
    if (!series.empty() && series.back().kld) std::cout << "  kld: " << *series.back().kld;
    std::cout << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming t-SNE: incremental batch projection with density "
                 "representatives, hull summaries and decay-driven forgetting"};
    app.require_subcommand(1);

    CliOptions run_opts;
    CliOptions base_opts;
    auto* run_cmd = app.add_subcommand("run", "stream a dataset through the pipeline");
    add_common_flags(run_cmd, run_opts);
    auto* base_cmd =
        app.add_subcommand("baseline", "full-refit-per-batch reference (same metrics schema)");
    add_common_flags(base_cmd, base_opts);
    base_cmd->add_option("--baseline-cap", base_opts.baseline_cap,
                         "refuse streams longer than this")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    run_opts.total_set = run_cmd->count("--total") > 0;
    base_opts.total_set = base_cmd->count("--total") > 0;

    try {
        if (run_cmd->parsed()) return run_pipeline(run_opts);
        return run_baseline(base_opts);
    } catch (const stsne::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
