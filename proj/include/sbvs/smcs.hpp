#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "sbvs/model_space.hpp"

namespace sbvs {

/// Level and tuning of the sequential model confidence set.
struct SmcsConfig {
    double alpha = 0.1;
    double lambda = 1.0 / (8.0 * 0.65 * 0.65);
    std::optional<double> varsigma = 0.65;  ///< when set, lambda = 1 / (8 varsigma^2)

    static SmcsConfig from_varsigma(double alpha, double varsigma);
    static SmcsConfig from_lambda(double alpha, double lambda);

    /// Throws ConfigError unless 0 < alpha < 1, lambda >= 0 and lambda
    /// matches varsigma when the latter is set.
    void validate() const;

    double log_threshold() const;  ///< log(1 / alpha)
};

/// Per-model losses observed at time t.
struct LossRecord {
    long t = 0;
    std::vector<double> losses;
};

/// E-process state for losses given per model; pairwise differences are
/// d_ij = L_i - L_j, so only the cumulative loss of each model is stored.
///
/// For model i the E-value term at time r is
///   (1/(m-1)) sum_{j != i} exp(lambda (A_i,r - A_j,r) - r/8),   A_i,r = sum_{s<=r} L_i,s
/// and log_sup holds log of its running maximum over r <= t (-inf at t = 0).
struct EProcessState {
    long t = 0;
    std::vector<double> cum_loss;
    std::vector<double> log_sup;
    std::vector<std::uint8_t> member;

    static EProcessState fresh(std::size_t m);
    std::size_t models() const noexcept { return cum_loss.size(); }
};

/// Same E-process for arbitrary antisymmetric pairwise loss differences.
/// Stores the m x m matrix of cumulative differences.
struct PairwiseEProcessState {
    long t = 0;
    Eigen::MatrixXd cum_diff;
    std::vector<double> log_sup;
    std::vector<std::uint8_t> member;

    static PairwiseEProcessState fresh(std::size_t m);
    std::size_t models() const noexcept { return log_sup.size(); }
};

/// L_i = (1/(m-1)) sum_{j != i} (l_j - l_i), the average log Bayes factor
/// against model i. Evaluated as (sum_j l_j - m l_i) / (m - 1).
/// Throws ConfigError when m < 2.
LossRecord loss_from_log_marginals(std::span<const double> log_bf, long t);

/// Squared error of the least-squares prediction (with intercept) of model
/// gamma fitted on the history and evaluated at x_t.
/// Throws InsufficientDataError when the history has fewer than k + 2 rows.
double l2_predictive_loss(const Eigen::MatrixXd& x_history, const Eigen::VectorXd& y_history,
                          std::span<const double> x_t, double y_t, const ModelVector& gamma);

/// d_ij = L_i - L_j.
Eigen::MatrixXd pairwise_differences(std::span<const double> losses);

/// Advances the state by one time step in O(m).
/// Throws SequencingError unless losses.t == state.t + 1.
EProcessState step(EProcessState state, const LossRecord& losses, const SmcsConfig& config);

/// Advances the pairwise state by one time step in O(m^2).
/// Throws DataError when pairwise_d is not antisymmetric within 1e-12.
PairwiseEProcessState step_pairwise(PairwiseEProcessState state, const Eigen::MatrixXd& pairwise_d,
                                    const SmcsConfig& config);

/// Indices i with log_sup_i <= log(1/alpha). May be empty.
std::vector<std::size_t> confidence_set(const EProcessState& state);
std::vector<std::size_t> confidence_set(const PairwiseEProcessState& state);

/// How per-step log Bayes factors are turned into losses.
///
/// cumulative: L_t is built from log BFs on data 1..t (the literal rule).
/// increment:  L_t is built from l_t - l_{t-1}, the per-round predictive
///             log BF. Experimental.
enum class LossMode { cumulative, increment };

LossMode parse_loss_mode(std::string_view name);
std::string_view to_string(LossMode mode) noexcept;

}  // namespace sbvs
