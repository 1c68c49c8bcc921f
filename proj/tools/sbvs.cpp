// Command-line front end: simulate, analyze, plot.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "sbvs/config.hpp"
#include "sbvs/errors.hpp"
#include "sbvs/experiment.hpp"
#include "sbvs/output.hpp"

namespace fs = std::filesystem;

namespace {

std::vector<sbvs::ReplicationResult> load_results(const fs::path& dir) {
    const auto path = dir / "trajectories.csv";
    std::ifstream in(path);
    if (!in) throw sbvs::IoError("cannot open " + path.string());
    return sbvs::read_trajectories_csv(in);
}

void print_table(const sbvs::ExperimentSummary& s, bool crossings) {
    fmt::print("{:<10}", "method");
    for (int k = 1; k <= s.p; ++k) fmt::print("{:>7}", fmt::format("x{}", k));
    fmt::print("\n");
    for (sbvs::Method m : {sbvs::Method::bvs, sbvs::Method::mixed, sbvs::Method::smcs,
                           sbvs::Method::zero_out}) {
        fmt::print("{:<10}", sbvs::to_string(m));
        const auto& row = crossings ? s.method(m).mean_crossings : s.method(m).final_frequency;
        for (double v : row) fmt::print("{:>7.2f}", v);
        fmt::print("\n");
    }
}

void print_summary(const sbvs::ExperimentSummary& s) {
    fmt::print("replications: {}\n\nmean crossings of 0.5 per covariate\n", s.reps);
    print_table(s, true);
    fmt::print("\nfinal-time inclusion frequency\n");
    print_table(s, false);
    fmt::print("\ntotal crossings per replication (mean / variance)\n");
    for (sbvs::Method m : sbvs::kMethods) {
        fmt::print("{:<10}{:>9.3f}{:>11.3f}\n", sbvs::to_string(m), s.method(m).total_crossings_mean,
                   s.method(m).total_crossings_variance);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential Bayesian variable selection with sequential model confidence sets"};
    app.require_subcommand(1);

    auto* simulate = app.add_subcommand("simulate", "run the replicated sequential experiment");
    std::string config_path;
    std::string out_dir;
    std::optional<int> reps;
    std::string profile = "desk";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    simulate->add_option("--config", config_path, "key=value config file")->required()->check(CLI::ExistingFile);
    simulate->add_option("--out", out_dir, "output directory")->required();
    simulate->add_option("--reps", reps, "replication count");
    simulate->add_option("--profile", profile, "desk (20 reps, M=10) or full (100 reps, M=50)")
        ->check(CLI::IsMember({"desk", "full"}));
    simulate->add_option("--seed", seed, "base seed");
    simulate->add_option("--threads", threads, "worker threads (0: all cores)");

    auto* analyze = app.add_subcommand("analyze", "recompute tables from trajectories.csv");
    std::string analyze_dir;
    analyze->add_option("--in", analyze_dir, "directory written by simulate")->required()->check(CLI::ExistingDirectory);

    auto* plot = app.add_subcommand("plot", "draw one replication as SVG");
    std::string plot_dir;
    int plot_rep = 0;
    plot->add_option("--in", plot_dir, "directory written by simulate")->required()->check(CLI::ExistingDirectory);
    plot->add_option("--rep", plot_rep, "replication index")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) {
            auto config = sbvs::load_config(config_path,
                                            sbvs::ExperimentConfig::for_profile(sbvs::parse_profile(profile)));
            if (reps) config.reps = *reps;
            if (seed) config.base_seed = *seed;
            if (threads) config.threads = *threads;
            config.validate();
            const auto results = sbvs::run_experiment(config);
            sbvs::emit_outputs(results, config, out_dir);
            print_summary(sbvs::aggregate(results));
            fmt::print("\nwrote {}\n", out_dir);
        } else if (*analyze) {
            const auto results = load_results(analyze_dir);
            if (results.empty()) throw sbvs::DataError("trajectories.csv holds no replications");
            const auto summary = sbvs::aggregate(results);
            sbvs::emit_tables(summary, results.front().n_min, analyze_dir);
            print_summary(summary);
        } else if (*plot) {
            const fs::path dir = plot_dir;
            const auto config = sbvs::load_config(dir / "manifest.txt");
            const auto results = load_results(dir);
            const sbvs::ReplicationResult* found = nullptr;
            for (const auto& r : results) {
                if (r.rep == plot_rep) found = &r;
            }
            if (found == nullptr) throw sbvs::DataError(fmt::format("replication {} not found", plot_rep));
            fs::create_directories(dir / "plots");
            const auto path = dir / "plots" / fmt::format("rep_{}.svg", plot_rep);
            std::ofstream out(path);
            if (!out) throw sbvs::IoError("cannot open " + path.string());
            sbvs::write_replication_svg(out, *found, sbvs::active_covariates(config.dgp),
                                        sbvs::emphasized_covariates(config.dgp));
            fmt::print("wrote {}\n", path.string());
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
