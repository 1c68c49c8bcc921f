#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "sbvs/model_space.hpp"

namespace sbvs {

/// Running cross-products of z = (1, x) and y. Any model's R^2, and hence its
/// g-prior Bayes factor, is a function of these statistics alone.
class GramStats {
public:
    explicit GramStats(int p);

    /// Batch construction from the rows of X.
    static GramStats from_data(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

    /// Adds one observation. Throws DataError on non-finite input and
    /// ShapeError when x does not have p entries.
    void add(std::span<const double> x, double y);

    int p() const noexcept { return p_; }
    long n() const noexcept { return n_; }
    const Eigen::MatrixXd& sxx() const noexcept { return sxx_; }
    const Eigen::VectorXd& sxy() const noexcept { return sxy_; }
    double syy() const noexcept { return syy_; }

    /// Centered covariate cross-products sum_j (x_j - xbar)(x_j - xbar)'.
    Eigen::MatrixXd centered_xx() const;
    /// Centered sum_j (x_j - xbar)(y_j - ybar).
    Eigen::VectorXd centered_xy() const;
    /// Centered sum_j (y_j - ybar)^2.
    double centered_yy() const;

private:
    int p_;
    long n_ = 0;
    Eigen::MatrixXd sxx_;
    Eigen::VectorXd sxy_;
    double syy_ = 0.0;
};

GramStats update_stats(GramStats stats, std::span<const double> x, double y);

/// Unit-information choice g = n.
inline double unit_information_g(long n) { return static_cast<double>(n); }

/// Coefficient of determination of model gamma (with intercept), clamped to
/// [0, 1 - 1e-12]. Solves the subset normal equations directly.
double r_squared(const GramStats& stats, const ModelVector& gamma);

/// log BF of gamma against the intercept-only model under Zellner's g-prior
/// on the slopes and p(alpha, sigma) ∝ 1/sigma:
///
///   ((n - 1 - k)/2) log(1 + g) - ((n - 1)/2) log(1 + g (1 - R^2))
///
/// Throws InsufficientDataError when n < k + 2.
double log_bf_null(const GramStats& stats, const ModelVector& gamma, double g);

/// Same closed form evaluated from R^2 directly.
double log_bf_from_r2(double r2, long n, int k, double g);

/// R^2 of every model in index order. The covariate subsets are visited
/// depth first so each model's Cholesky factor extends its parent's by one
/// row: O(m p^2) work for the whole space.
std::vector<double> r_squared_sweep(const GramStats& stats, const ModelSpace& space);

/// log BF against the null model for every model, in index order.
std::vector<double> model_sweep(const GramStats& stats, const ModelSpace& space, double g);

/// Per-model log of the arithmetic mean of Bayes factors across imputations:
/// log((1/M) sum_m exp(l_i^(m))). Throws ShapeError on length mismatch.
std::vector<double> average_over_imputations(std::span<const std::vector<double>> tables);

enum class ModelPrior { uniform, scott_berger };

ModelPrior parse_model_prior(std::string_view name);
std::string_view to_string(ModelPrior prior) noexcept;

/// Log prior mass of every model, normalized.
std::vector<double> log_model_prior(const ModelSpace& space, ModelPrior prior);

/// P(i) ∝ exp(l_i) * prior(i), normalized in log space.
/// Throws DataError on non-finite entries, ShapeError on a size mismatch.
std::vector<double> posterior_model_probs(std::span<const double> log_bf, const ModelSpace& space,
                                          ModelPrior prior);

}  // namespace sbvs
