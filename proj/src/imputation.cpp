#include "sbvs/imputation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Cholesky>

#include "sbvs/errors.hpp"

namespace sbvs {

namespace {

constexpr double kRidge = 1e-8;

struct ColumnPlan {
    Eigen::Index column;
    std::vector<Eigen::Index> observed_rows;
    std::vector<Eigen::Index> missing_rows;
    std::vector<Eigen::Index> predictors;  // other covariate columns
};

std::vector<ColumnPlan> plan_columns(const MissingDataset& data) {
    const Eigen::Index n = data.n();
    const Eigen::Index p = data.p();
    std::vector<Eigen::Index> observed_count(static_cast<std::size_t>(p));
    for (Eigen::Index k = 0; k < p; ++k) {
        observed_count[static_cast<std::size_t>(k)] = (data.mask.col(k).array() != 0).count();
    }

    std::vector<ColumnPlan> plans;
    for (Eigen::Index k = 0; k < p; ++k) {
        const Eigen::Index n_obs = observed_count[static_cast<std::size_t>(k)];
        if (n_obs == n) continue;
        if (n_obs < kMinObservedPerColumn) {
            throw InsufficientDataError("covariate column " + std::to_string(k + 1) + " has " +
                                        std::to_string(n_obs) + " observed cells; need at least " +
                                        std::to_string(kMinObservedPerColumn));
        }
        ColumnPlan plan{k, {}, {}, {}};
        for (Eigen::Index j = 0; j < n; ++j) {
            (data.mask(j, k) != 0 ? plan.observed_rows : plan.missing_rows).push_back(j);
        }
        for (Eigen::Index other = 0; other < p; ++other) {
            if (other != k) plan.predictors.push_back(other);
        }
        // intercept + y + predictors must leave >= 1 residual degree of freedom
        const auto budget = static_cast<std::size_t>(n_obs - 3);
        if (plan.predictors.size() > budget) {
            std::stable_sort(plan.predictors.begin(), plan.predictors.end(),
                             [&](Eigen::Index a, Eigen::Index b) {
                                 return observed_count[static_cast<std::size_t>(a)] >
                                        observed_count[static_cast<std::size_t>(b)];
                             });
            plan.predictors.resize(budget);
            std::sort(plan.predictors.begin(), plan.predictors.end());
        }
        plans.push_back(std::move(plan));
    }
    return plans;
}

void fill_design_row(Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row, const Eigen::MatrixXd& current,
                     const Eigen::VectorXd& y, Eigen::Index j,
                     const std::vector<Eigen::Index>& predictors) {
    row(0) = 1.0;
    row(1) = y(j);
    for (std::size_t c = 0; c < predictors.size(); ++c) {
        row(static_cast<Eigen::Index>(c) + 2) = current(j, predictors[c]);
    }
}

void initialize(Eigen::MatrixXd& current, const std::vector<ColumnPlan>& plans, Rng& rng) {
    std::normal_distribution<double> normal;
    for (const auto& plan : plans) {
        double mean = 0.0;
        for (auto j : plan.observed_rows) mean += current(j, plan.column);
        mean /= static_cast<double>(plan.observed_rows.size());
        double ss = 0.0;
        for (auto j : plan.observed_rows) ss += std::pow(current(j, plan.column) - mean, 2);
        const double sd = std::sqrt(ss / static_cast<double>(plan.observed_rows.size() - 1));
        for (auto j : plan.missing_rows) current(j, plan.column) = mean + sd * normal(rng);
    }
}

void redraw_column(Eigen::MatrixXd& current, const Eigen::VectorXd& y, const ColumnPlan& plan,
                   Rng& rng) {
    std::normal_distribution<double> normal;
    const auto q = static_cast<Eigen::Index>(plan.predictors.size()) + 2;
    const auto n_obs = static_cast<Eigen::Index>(plan.observed_rows.size());

    Eigen::MatrixXd Z(n_obs, q);
    Eigen::VectorXd target(n_obs);
    for (Eigen::Index r = 0; r < n_obs; ++r) {
        const auto j = plan.observed_rows[static_cast<std::size_t>(r)];
        fill_design_row(Z.row(r), current, y, j, plan.predictors);
        target(r) = current(j, plan.column);
    }

    Eigen::MatrixXd gram = Z.transpose() * Z;
    gram.diagonal().array() += kRidge;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) {
        throw NumericalError("imputation conditional for column " +
                             std::to_string(plan.column + 1) + " is singular");
    }
    const Eigen::VectorXd coef = llt.solve(Z.transpose() * target);
    const double rss = (target - Z * coef).squaredNorm();
    const double s2 = rss / static_cast<double>(n_obs - q);

    // coef* = coef + sqrt(s2) * L^-T z has covariance s2 * gram^-1
    Eigen::VectorXd z(q);
    for (Eigen::Index c = 0; c < q; ++c) z(c) = normal(rng);
    const Eigen::VectorXd draw =
        coef + std::sqrt(s2) * llt.matrixU().solve(z);

    Eigen::RowVectorXd row(q);
    for (auto j : plan.missing_rows) {
        fill_design_row(row, current, y, j, plan.predictors);
        current(j, plan.column) = row.dot(draw) + std::sqrt(s2) * normal(rng);
    }
}

Eigen::MatrixXd complete_once(const MissingDataset& data, const std::vector<ColumnPlan>& plans,
                              int sweeps, Rng& rng) {
    Eigen::MatrixXd current = data.X;
    initialize(current, plans, rng);
    for (int s = 0; s < sweeps; ++s) {
        for (const auto& plan : plans) redraw_column(current, data.y, plan, rng);
    }
    return current;
}

}  // namespace

void ImputationConfig::validate(int p) const {
    if (M < 1) throw ConfigError("imp.M must be >= 1");
    if (sweeps < 1) throw ConfigError("imp.sweeps must be >= 1");
    if (min_n <= p + 2) {
        throw ConfigError("imp.min_n must exceed p + 2 = " + std::to_string(p + 2));
    }
}

ImputedSet impute(const MissingDataset& data, const ImputationConfig& config, Rng& rng) {
    config.validate(static_cast<int>(data.p()));
    if (data.n() < config.min_n) {
        throw InsufficientDataError("imputation needs at least " + std::to_string(config.min_n) +
                                    " observations, got " + std::to_string(data.n()));
    }
    if (data.mask.rows() != data.n() || data.mask.cols() != data.p() ||
        data.X.rows() != data.n()) {
        throw ShapeError("dataset mask, X and y dimensions disagree");
    }

    const auto plans = plan_columns(data);

    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(config.M));
    for (auto& s : seeds) s = rng();

    ImputedSet out{{}, data};
    out.completions.reserve(seeds.size());
    for (auto seed : seeds) {
        if (plans.empty()) {
            out.completions.push_back(data.X);
            continue;
        }
        Rng sub(seed);
        out.completions.push_back(complete_once(data, plans, config.sweeps, sub));
    }
    return out;
}

}  // namespace sbvs
