#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "sbvs/config.hpp"
#include "sbvs/inclusion.hpp"

namespace sbvs {

inline constexpr std::size_t kMethodCount = 4;

constexpr std::size_t method_slot(Method m) noexcept { return static_cast<std::size_t>(m); }

/// One full sequential pass over a simulated dataset.
struct ReplicationResult {
    int rep = 0;
    int n_min = 0;
    std::array<InclusionTrajectory, kMethodCount> trajectories;  ///< indexed by method_slot
    std::vector<std::size_t> set_sizes;                          ///< |M_t| for t = 1..t_max

    // derived by summarize()
    std::array<std::vector<long>, kMethodCount> crossings;
    std::array<std::vector<std::uint8_t>, kMethodCount> final_included;
    bool nan_dropped = false;

    // diagnostics recorded by run_replication only
    long nested_violations = 0;
    long zero_out_fallbacks = 0;
    bool true_model_excluded = false;
    double final_true_model_posterior = 0.0;

    const InclusionTrajectory& trajectory(Method m) const { return trajectories[method_slot(m)]; }

    /// Recomputes crossings and final classifications from the trajectories.
    void summarize();
};

/// Number of indices t >= 2 whose side of 0.5 differs from t - 1, with
/// prob >= 0.5 counting as active. NaN entries are dropped first.
/// Throws DataError on an empty series.
long count_crossings(std::span<const double> series);

/// Generates, masks and then, for n = n_min..n_max, imputes the first n rows,
/// sweeps all models per completion, averages Bayes factors, steps the
/// E-process and records the four inclusion vectors. Deterministic given
/// (config.base_seed, rep).
ReplicationResult run_replication(const ExperimentConfig& config, int rep);

/// Runs reps 0..config.reps-1 on config.threads workers; output order is
/// by replication index regardless of scheduling.
std::vector<ReplicationResult> run_experiment(const ExperimentConfig& config);

struct MethodSummary {
    std::vector<double> mean_crossings;   ///< per covariate
    std::vector<double> final_frequency;  ///< per covariate
    double total_crossings_mean = 0.0;
    double total_crossings_variance = 0.0;  ///< sample variance across reps
    std::vector<double> cumulative_total_mean;  ///< per t: crossings accumulated up to t
    std::vector<double> cumulative_total_sd;
};

struct ExperimentSummary {
    int reps = 0;
    int p = 0;
    std::array<MethodSummary, kMethodCount> methods;
    double zero_out_bvs_agreement = 0.0;  ///< mean covariates classified alike at t_max
    long nested_violations = 0;
    double true_model_exclusion_rate = 0.0;

    const MethodSummary& method(Method m) const { return methods[method_slot(m)]; }
};

/// Table-1/Table-2/Figure-2 style aggregates. Throws DataError on no results.
ExperimentSummary aggregate(std::span<const ReplicationResult> results);

}  // namespace sbvs
