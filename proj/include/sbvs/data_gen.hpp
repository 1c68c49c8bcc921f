#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Core>

#include "sbvs/model_space.hpp"
#include "sbvs/random.hpp"

namespace sbvs {

using MaskMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Linear-Gaussian data-generating process y = X beta + eps, eps ~ N(0, sigma2),
/// rows of X ~ N(0, cov). No intercept.
struct DgpConfig {
    int p = 10;
    Eigen::VectorXd beta;
    double sigma2 = 2.5;
    Eigen::MatrixXd cov;

    /// Model whose bit k is set iff beta_k != 0.
    ModelVector true_model() const;

    /// Throws ConfigError / ShapeError when fields are inconsistent.
    void validate() const;

    /// beta = (1,2,0,0,0,1,2,0,0,0), sigma2 = 2.5, equicorrelated covariates.
    static DgpConfig reference(double rho = 0.5);
};

/// p x p matrix with unit diagonal and rho off the diagonal.
Eigen::MatrixXd equicorrelated(int p, double rho);

/// Response plus covariates with missing cells. mask(j, k) == 1 means
/// observed; unobserved cells of X hold NaN.
struct MissingDataset {
    Eigen::VectorXd y;
    Eigen::MatrixXd X;
    MaskMatrix mask;

    Eigen::Index n() const noexcept { return y.size(); }
    Eigen::Index p() const noexcept { return X.cols(); }

    /// First `rows` observations.
    MissingDataset head(Eigen::Index rows) const;

    std::size_t missing_count() const;
};

enum class Missingness { mcar, mar_y };

Missingness parse_missingness(std::string_view name);
std::string_view to_string(Missingness m) noexcept;

/// n i.i.d. draws from N(0, cov) as rows, via the Cholesky factor of cov.
/// Throws NumericalError if cov is not symmetric positive definite.
Eigen::MatrixXd gen_covariates(Eigen::Index n, const Eigen::MatrixXd& cov, Rng& rng);

Eigen::VectorXd gen_responses(const Eigen::MatrixXd& X, const DgpConfig& config, Rng& rng);

/// Masks covariate cells; y is never masked.
///
/// mcar:  each cell independently with probability `rate`.
/// mar_y: cell (j, k) with probability logistic(a + b * y_j), b = 1 / sd(y),
///        a solved by bisection so the expected rate equals `rate`. The mask
///        is redrawn until the realized rate is within 0.02 of `rate`.
MissingDataset apply_missingness(const Eigen::MatrixXd& X, double rate, Missingness mechanism,
                                 Rng& rng, const Eigen::VectorXd& y);

}  // namespace sbvs
