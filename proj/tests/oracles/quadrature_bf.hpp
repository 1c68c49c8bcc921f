#pragma once

// Brute-force numerical integration of the g-prior marginal likelihood.
//
// Model: y = a 1 + Xc b + e, e ~ N(0, s^2 I), flat prior on a, p(s) ∝ 1/s,
// b | s ~ N(0, g s^2 (Xc'Xc)^-1), with Xc the column-centered design.
// The intercept is integrated analytically; the slopes and log s are
// integrated with the trapezoid rule on a product grid. The grid in b is
// an affine image of a square grid, centred and scaled so the integrand is
// resolved at every s; the integrand itself is evaluated pointwise from the
// raw data (likelihood x prior density), never from a closed form.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/Core>

namespace oracle {

inline double log_sum_exp_vec(const std::vector<double>& v) {
    double hi = -INFINITY;
    for (double x : v) hi = std::max(hi, x);
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - hi);
    return hi + std::log(acc);
}

struct QuadratureGrid {
    double u_step = 0.05;
    double w_step = 0.5;
    double w_half_width = 7.0;
};

/// log marginal likelihood (up to constants shared by all models) of the
/// model with design columns `X` (n x k, k may be 0).
inline double log_marginal(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double g,
                           const QuadratureGrid& grid = {}) {
    const Eigen::Index n = y.size();
    const Eigen::Index k = X.cols();
    const double nn = static_cast<double>(n);
    const double log2pi = std::log(2.0 * std::numbers::pi);

    const Eigen::VectorXd yc = y.array() - y.mean();
    Eigen::MatrixXd Xc = X;
    for (Eigen::Index c = 0; c < k; ++c) Xc.col(c).array() -= X.col(c).mean();

    // grid placement only
    double rss_floor = yc.squaredNorm();
    Eigen::MatrixXd A;
    Eigen::MatrixXd R_inv;
    Eigen::VectorXd centre;
    double log_det_A = 0.0;
    const double shrink = std::sqrt(g / (1.0 + g));
    if (k > 0) {
        A = Xc.transpose() * Xc;
        Eigen::LLT<Eigen::MatrixXd> llt(A);
        const Eigen::MatrixXd R = llt.matrixU();
        R_inv = R.inverse();
        log_det_A = 2.0 * R.diagonal().array().log().sum();
        const Eigen::VectorXd ols = llt.solve(Xc.transpose() * yc);
        centre = (g / (1.0 + g)) * ols;
        rss_floor = (yc - Xc * ols).squaredNorm();
    }
    const double u_peak_low = 0.5 * std::log(std::max(rss_floor, 1e-300) / (nn - 1.0));
    const double u_peak_high = 0.5 * std::log(yc.squaredNorm() / (nn - 1.0));
    const double u_lo = u_peak_low - 6.0;
    const double u_hi = u_peak_high + 40.0 / (nn - 1.0) + 6.0;

    std::vector<double> w_nodes;
    for (double w = -grid.w_half_width; w <= grid.w_half_width + 1e-12; w += grid.w_step) {
        w_nodes.push_back(w);
    }
    const std::size_t nw = w_nodes.size();
    std::size_t w_points = 1;
    for (Eigen::Index c = 0; c < k; ++c) w_points *= nw;

    std::vector<double> terms;
    Eigen::VectorXd w(k);
    for (double u = u_lo; u <= u_hi; u += grid.u_step) {
        const double s2 = std::exp(2.0 * u);
        const double log_common = -0.5 * (nn - 1.0) * log2pi - (nn - 1.0) * u - 0.5 * std::log(nn);
        if (k == 0) {
            terms.push_back(log_common - yc.squaredNorm() / (2.0 * s2));
            continue;
        }
        const double kk = static_cast<double>(k);
        // Jacobian of b = centre + s * shrink * R^-1 w
        const double log_jac = kk * (u + std::log(shrink)) - 0.5 * log_det_A;
        const double log_prior_norm = -0.5 * kk * log2pi - 0.5 * kk * std::log(g * s2) + 0.5 * log_det_A;
        for (std::size_t idx = 0; idx < w_points; ++idx) {
            std::size_t rest = idx;
            for (Eigen::Index c = 0; c < k; ++c) {
                w(c) = w_nodes[rest % nw];
                rest /= nw;
            }
            const Eigen::VectorXd b = centre + std::sqrt(s2) * shrink * (R_inv * w);
            double q = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                const double r = yc(j) - Xc.row(j).dot(b);
                q += r * r;
            }
            const double quad_prior = b.dot(A * b);
            terms.push_back(log_common - q / (2.0 * s2) + log_prior_norm -
                            quad_prior / (2.0 * g * s2) + log_jac);
        }
    }
    return log_sum_exp_vec(terms) + std::log(grid.u_step) +
           static_cast<double>(k) * std::log(grid.w_step);
}

/// log BF of the model using columns `X` against the intercept-only model.
inline double log_bf_null(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double g,
                          const QuadratureGrid& grid = {}) {
    const Eigen::MatrixXd none(y.size(), 0);
    return log_marginal(X, y, g, grid) - log_marginal(none, y, g, grid);
}

}  // namespace oracle
