#include "sbvs/smcs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/QR>

#include "sbvs/errors.hpp"
#include "sbvs/log_sum_exp.hpp"

namespace sbvs {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void refresh_membership(std::span<const double> log_sup, std::vector<std::uint8_t>& member,
                        double threshold) {
    for (std::size_t i = 0; i < log_sup.size(); ++i) {
        member[i] = log_sup[i] <= threshold ? 1 : 0;
    }
}

}  // namespace

SmcsConfig SmcsConfig::from_varsigma(double alpha, double varsigma) {
    SmcsConfig c;
    c.alpha = alpha;
    c.varsigma = varsigma;
    c.lambda = 1.0 / (8.0 * varsigma * varsigma);
    c.validate();
    return c;
}

SmcsConfig SmcsConfig::from_lambda(double alpha, double lambda) {
    SmcsConfig c;
    c.alpha = alpha;
    c.varsigma.reset();
    c.lambda = lambda;
    c.validate();
    return c;
}

void SmcsConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("smcs.alpha must lie in (0, 1)");
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("smcs.lambda must be >= 0");
    if (varsigma) {
        if (!(*varsigma > 0.0)) throw ConfigError("smcs.varsigma must be > 0");
        const double implied = 1.0 / (8.0 * *varsigma * *varsigma);
        if (std::abs(implied - lambda) > 1e-12 * implied) {
            throw ConfigError("smcs.lambda disagrees with 1 / (8 varsigma^2)");
        }
    }
}

double SmcsConfig::log_threshold() const { return -std::log(alpha); }

EProcessState EProcessState::fresh(std::size_t m) {
    return {0, std::vector<double>(m, 0.0), std::vector<double>(m, kNegInf),
            std::vector<std::uint8_t>(m, 1)};
}

PairwiseEProcessState PairwiseEProcessState::fresh(std::size_t m) {
    const auto mm = static_cast<Eigen::Index>(m);
    return {0, Eigen::MatrixXd::Zero(mm, mm), std::vector<double>(m, kNegInf),
            std::vector<std::uint8_t>(m, 1)};
}

LossRecord loss_from_log_marginals(std::span<const double> log_bf, long t) {
    const std::size_t m = log_bf.size();
    if (m < 2) throw ConfigError("loss construction needs at least two models");
    const double total = std::accumulate(log_bf.begin(), log_bf.end(), 0.0);
    const double md = static_cast<double>(m);
    LossRecord rec{t, std::vector<double>(m)};
    for (std::size_t i = 0; i < m; ++i) rec.losses[i] = (total - md * log_bf[i]) / (md - 1.0);
    return rec;
}

double l2_predictive_loss(const Eigen::MatrixXd& x_history, const Eigen::VectorXd& y_history,
                          std::span<const double> x_t, double y_t, const ModelVector& gamma) {
    if (x_history.rows() != y_history.size()) throw ShapeError("history X and y row counts differ");
    if (x_history.cols() != gamma.p() || x_t.size() != static_cast<std::size_t>(gamma.p())) {
        throw ShapeError("covariate count does not match model");
    }
    const auto cols = gamma.covariates();
    const auto k = static_cast<Eigen::Index>(cols.size());
    if (x_history.rows() < k + 2) {
        throw InsufficientDataError("l2 loss of a " + std::to_string(k) +
                                    "-covariate model needs at least " + std::to_string(k + 2) +
                                    " past observations");
    }
    Eigen::MatrixXd design(x_history.rows(), k + 1);
    design.col(0).setOnes();
    Eigen::RowVectorXd at(k + 1);
    at(0) = 1.0;
    for (Eigen::Index c = 0; c < k; ++c) {
        design.col(c + 1) = x_history.col(cols[static_cast<std::size_t>(c)]);
        at(c + 1) = x_t[static_cast<std::size_t>(cols[static_cast<std::size_t>(c)])];
    }
    const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(y_history);
    const double residual = at.dot(coef) - y_t;
    return residual * residual;
}

Eigen::MatrixXd pairwise_differences(std::span<const double> losses) {
    const auto m = static_cast<Eigen::Index>(losses.size());
    Eigen::MatrixXd d(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            d(i, j) = losses[static_cast<std::size_t>(i)] - losses[static_cast<std::size_t>(j)];
        }
    }
    return d;
}

EProcessState step(EProcessState state, const LossRecord& losses, const SmcsConfig& config) {
    const std::size_t m = state.models();
    if (m < 2) throw ConfigError("E-process needs at least two models");
    if (losses.t != state.t + 1) {
        throw SequencingError("loss record for t=" + std::to_string(losses.t) +
                              " applied to state at t=" + std::to_string(state.t));
    }
    if (losses.losses.size() != m) throw ShapeError("loss record does not match model count");
    for (double v : losses.losses) {
        if (!std::isfinite(v)) throw DataError("non-finite loss");
    }

    state.t = losses.t;
    for (std::size_t i = 0; i < m; ++i) state.cum_loss[i] += losses.losses[i];

    // log sum_{j != i} exp(lambda (A_i - A_j)) = lambda a_i + lse_{j != i}(-lambda a_j),
    // with a = A - mean(A); exclusion of j = i via prefix/suffix log-sum-exp.
    const double lambda = config.lambda;
    const double shift =
        std::accumulate(state.cum_loss.begin(), state.cum_loss.end(), 0.0) / static_cast<double>(m);
    std::vector<double> w(m);
    for (std::size_t j = 0; j < m; ++j) w[j] = -lambda * (state.cum_loss[j] - shift);

    std::vector<double> prefix(m + 1, kNegInf);
    std::vector<double> suffix(m + 1, kNegInf);
    for (std::size_t j = 0; j < m; ++j) prefix[j + 1] = log_add(prefix[j], w[j]);
    for (std::size_t j = m; j-- > 0;) suffix[j] = log_add(suffix[j + 1], w[j]);

    const double offset = std::log(static_cast<double>(m - 1)) + static_cast<double>(state.t) / 8.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double others = log_add(prefix[i], suffix[i + 1]);
        const double term = -w[i] + others - offset;
        state.log_sup[i] = std::max(state.log_sup[i], term);
    }
    refresh_membership(state.log_sup, state.member, config.log_threshold());
    return state;
}

PairwiseEProcessState step_pairwise(PairwiseEProcessState state, const Eigen::MatrixXd& pairwise_d,
                                    const SmcsConfig& config) {
    const auto m = static_cast<Eigen::Index>(state.models());
    if (m < 2) throw ConfigError("E-process needs at least two models");
    if (pairwise_d.rows() != m || pairwise_d.cols() != m) {
        throw ShapeError("pairwise difference matrix must be m x m");
    }
    if (!pairwise_d.allFinite()) throw DataError("non-finite pairwise loss difference");
    if ((pairwise_d + pairwise_d.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw DataError("pairwise loss differences are not antisymmetric");
    }

    ++state.t;
    state.cum_diff += pairwise_d;
    const double offset = std::log(static_cast<double>(m - 1)) + static_cast<double>(state.t) / 8.0;
    std::vector<double> row(static_cast<std::size_t>(m - 1));
    for (Eigen::Index i = 0; i < m; ++i) {
        std::size_t c = 0;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (j != i) row[c++] = config.lambda * state.cum_diff(i, j);
        }
        const double term = log_sum_exp(row) - offset;
        auto& sup = state.log_sup[static_cast<std::size_t>(i)];
        sup = std::max(sup, term);
    }
    refresh_membership(state.log_sup, state.member, config.log_threshold());
    return state;
}

namespace {

std::vector<std::size_t> members_of(const std::vector<std::uint8_t>& member) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < member.size(); ++i) {
        if (member[i] != 0) out.push_back(i);
    }
    return out;
}

}  // namespace

std::vector<std::size_t> confidence_set(const EProcessState& state) {
    return members_of(state.member);
}

std::vector<std::size_t> confidence_set(const PairwiseEProcessState& state) {
    return members_of(state.member);
}

LossMode parse_loss_mode(std::string_view name) {
    if (name == "cumulative") return LossMode::cumulative;
    if (name == "increment") return LossMode::increment;
    throw ConfigError("unknown loss mode '" + std::string(name) + "'");
}

std::string_view to_string(LossMode mode) noexcept {
    return mode == LossMode::cumulative ? "cumulative" : "increment";
}

}  // namespace sbvs
