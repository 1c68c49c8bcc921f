#include "sbvs/data_gen.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/Cholesky>

#include "sbvs/errors.hpp"

namespace sbvs {

ModelVector DgpConfig::true_model() const {
    std::uint32_t index = 0;
    for (int k = 0; k < p; ++k) {
        if (beta(k) != 0.0) index |= 1U << k;
    }
    return ModelVector(p, index);
}

void DgpConfig::validate() const {
    if (p < 1 || p > kMaxCovariates) throw SizeLimitError("dgp.p out of range");
    if (beta.size() != p) throw ShapeError("dgp.beta length does not match p");
    if (cov.rows() != p || cov.cols() != p) throw ShapeError("dgp.cov must be p x p");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw ConfigError("dgp.sigma2 must be > 0");
    if (!beta.allFinite()) throw ConfigError("dgp.beta must be finite");
    if (!cov.isApprox(cov.transpose(), 1e-12)) throw ConfigError("dgp.cov must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) throw ConfigError("dgp.cov must be positive definite");
}

DgpConfig DgpConfig::reference(double rho) {
    DgpConfig c;
    c.p = 10;
    c.beta.resize(10);
    c.beta << 1, 2, 0, 0, 0, 1, 2, 0, 0, 0;
    c.sigma2 = 2.5;
    c.cov = equicorrelated(10, rho);
    return c;
}

Eigen::MatrixXd equicorrelated(int p, double rho) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Constant(p, p, rho);
    c.diagonal().setOnes();
    return c;
}

MissingDataset MissingDataset::head(Eigen::Index rows) const {
    if (rows < 0 || rows > n()) throw ShapeError("head: row count exceeds dataset size");
    return {y.head(rows), X.topRows(rows), mask.topRows(rows)};
}

std::size_t MissingDataset::missing_count() const {
    return static_cast<std::size_t>((mask.array() == 0).count());
}

Missingness parse_missingness(std::string_view name) {
    if (name == "mcar") return Missingness::mcar;
    if (name == "mar_y") return Missingness::mar_y;
    throw ConfigError("unknown missingness mechanism '" + std::string(name) + "'");
}

std::string_view to_string(Missingness m) noexcept {
    return m == Missingness::mcar ? "mcar" : "mar_y";
}

Eigen::MatrixXd gen_covariates(Eigen::Index n, const Eigen::MatrixXd& cov, Rng& rng) {
    if (cov.rows() != cov.cols()) throw ShapeError("covariance must be square");
    if (!cov.isApprox(cov.transpose(), 1e-12)) throw NumericalError("covariance not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("covariance is not positive definite (Cholesky failed)");
    }
    const Eigen::MatrixXd lower = llt.matrixL();
    std::normal_distribution<double> normal;
    Eigen::MatrixXd z(n, cov.rows());
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < z.cols(); ++k) z(j, k) = normal(rng);
    }
    return z * lower.transpose();
}

Eigen::VectorXd gen_responses(const Eigen::MatrixXd& X, const DgpConfig& config, Rng& rng) {
    if (X.cols() != config.beta.size()) {
        throw ShapeError("X has " + std::to_string(X.cols()) + " columns, beta has " +
                         std::to_string(config.beta.size()));
    }
    std::normal_distribution<double> noise(0.0, std::sqrt(config.sigma2));
    Eigen::VectorXd y = X * config.beta;
    for (Eigen::Index j = 0; j < y.size(); ++j) y(j) += noise(rng);
    return y;
}

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Intercept a such that mean_j logistic(a + b * y_j) == rate.
double calibrate_intercept(const Eigen::VectorXd& y, double b, double rate) {
    auto expected = [&](double a) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < y.size(); ++j) s += logistic(a + b * y(j));
        return s / static_cast<double>(y.size());
    };
    double lo = -50.0;
    double hi = 50.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (expected(mid) < rate ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

MaskMatrix draw_mask(const Eigen::MatrixXd& prob, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    MaskMatrix mask(prob.rows(), prob.cols());
    for (Eigen::Index j = 0; j < prob.rows(); ++j) {
        for (Eigen::Index k = 0; k < prob.cols(); ++k) {
            mask(j, k) = unif(rng) < prob(j, k) ? 0 : 1;
        }
    }
    return mask;
}

}  // namespace

MissingDataset apply_missingness(const Eigen::MatrixXd& X, double rate, Missingness mechanism,
                                 Rng& rng, const Eigen::VectorXd& y) {
    if (!(rate >= 0.0) || rate >= 1.0) {
        throw ConfigError("missingness rate must lie in [0, 1), got " + std::to_string(rate));
    }
    if (y.size() != X.rows()) throw ShapeError("y and X row counts differ");

    MissingDataset out{y, X, MaskMatrix::Ones(X.rows(), X.cols())};
    if (rate == 0.0 || X.size() == 0) return out;

    if (mechanism == Missingness::mcar) {
        out.mask = draw_mask(Eigen::MatrixXd::Constant(X.rows(), X.cols(), rate), rng);
    } else {
        const double mean = y.mean();
        const double var = (y.array() - mean).square().sum() / static_cast<double>(y.size());
        const double b = var > 0.0 ? 1.0 / std::sqrt(var) : 0.0;
        const double a = calibrate_intercept(y, b, rate);
        Eigen::MatrixXd prob(X.rows(), X.cols());
        for (Eigen::Index j = 0; j < X.rows(); ++j) prob.row(j).setConstant(logistic(a + b * y(j)));

        constexpr int kMaxDraws = 10000;
        const auto cells = static_cast<double>(X.size());
        int draws = 0;
        do {
            if (++draws > kMaxDraws) {
                throw NumericalError("could not realize MAR missingness rate within 0.02");
            }
            out.mask = draw_mask(prob, rng);
        } while (std::abs(static_cast<double>((out.mask.array() == 0).count()) / cells - rate) >
                 0.02);
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (Eigen::Index j = 0; j < X.rows(); ++j) {
        for (Eigen::Index k = 0; k < X.cols(); ++k) {
            if (out.mask(j, k) == 0) out.X(j, k) = nan;
        }
    }
    return out;
}

}  // namespace sbvs
