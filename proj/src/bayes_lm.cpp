#include "sbvs/bayes_lm.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "sbvs/errors.hpp"
#include "sbvs/log_sum_exp.hpp"

namespace sbvs {

namespace {

constexpr double kMaxR2 = 1.0 - 1e-12;
constexpr double kJitter = 1e-10;

double clamp_r2(double r2) { return std::clamp(r2, 0.0, kMaxR2); }

double checked_centered_yy(const GramStats& stats) {
    const double syy = stats.centered_yy();
    if (!(syy > 0.0)) throw NumericalError("response has zero variance; R^2 undefined");
    return syy;
}

}  // namespace

GramStats::GramStats(int p)
    : p_(p), sxx_(Eigen::MatrixXd::Zero(p + 1, p + 1)), sxy_(Eigen::VectorXd::Zero(p + 1)) {
    if (p < 1 || p > kMaxCovariates) throw SizeLimitError("GramStats: p out of range");
}

GramStats GramStats::from_data(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (X.rows() != y.size()) throw ShapeError("X and y row counts differ");
    GramStats stats(static_cast<int>(X.cols()));
    Eigen::VectorXd row(X.cols());
    for (Eigen::Index j = 0; j < X.rows(); ++j) {
        row = X.row(j).transpose();
        stats.add(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())), y(j));
    }
    return stats;
}

void GramStats::add(std::span<const double> x, double y) {
    if (x.size() != static_cast<std::size_t>(p_)) {
        throw ShapeError("observation has " + std::to_string(x.size()) + " covariates, expected " +
                         std::to_string(p_));
    }
    if (!std::isfinite(y)) throw DataError("non-finite response");
    for (double v : x) {
        if (!std::isfinite(v)) throw DataError("non-finite covariate");
    }
    Eigen::VectorXd z(p_ + 1);
    z(0) = 1.0;
    for (int k = 0; k < p_; ++k) z(k + 1) = x[static_cast<std::size_t>(k)];
    sxx_.noalias() += z * z.transpose();
    sxy_ += z * y;
    syy_ += y * y;
    ++n_;
}

Eigen::MatrixXd GramStats::centered_xx() const {
    const double n = static_cast<double>(n_);
    const auto sums = sxx_.col(0).tail(p_);
    return sxx_.bottomRightCorner(p_, p_) - sums * sums.transpose() / n;
}

Eigen::VectorXd GramStats::centered_xy() const {
    const double n = static_cast<double>(n_);
    return sxy_.tail(p_) - sxx_.col(0).tail(p_) * sxy_(0) / n;
}

double GramStats::centered_yy() const {
    return syy_ - sxy_(0) * sxy_(0) / static_cast<double>(n_);
}

GramStats update_stats(GramStats stats, std::span<const double> x, double y) {
    stats.add(x, y);
    return stats;
}

double r_squared(const GramStats& stats, const ModelVector& gamma) {
    if (gamma.p() != stats.p()) throw ShapeError("model and statistics disagree on p");
    if (stats.n() < 2) throw InsufficientDataError("R^2 needs at least two observations");
    const double syy = checked_centered_yy(stats);
    const auto cols = gamma.covariates();
    if (cols.empty()) return 0.0;

    const Eigen::MatrixXd cxx = stats.centered_xx();
    const Eigen::VectorXd cxy = stats.centered_xy();
    const auto k = static_cast<Eigen::Index>(cols.size());
    Eigen::MatrixXd a(k, k);
    Eigen::VectorXd b(k);
    for (Eigen::Index r = 0; r < k; ++r) {
        b(r) = cxy(cols[static_cast<std::size_t>(r)]);
        for (Eigen::Index c = 0; c < k; ++c) {
            a(r, c) = cxx(cols[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)]);
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) {
        const double scale = a.diagonal().maxCoeff();
        if (!(scale > 0.0)) {
            throw NumericalError("model " + std::to_string(gamma.index()) +
                                 " contains a constant covariate");
        }
        a.diagonal().array() += kJitter * scale;
        llt.compute(a);
        if (llt.info() != Eigen::Success) {
            throw NumericalError("design of model " + std::to_string(gamma.index()) +
                                 " is rank deficient beyond jitter");
        }
    }
    return clamp_r2(b.dot(llt.solve(b)) / syy);
}

double log_bf_from_r2(double r2, long n, int k, double g) {
    const double nn = static_cast<double>(n);
    const double kk = static_cast<double>(k);
    return 0.5 * (nn - 1.0 - kk) * std::log1p(g) -
           0.5 * (nn - 1.0) * std::log1p(g * (1.0 - clamp_r2(r2)));
}

double log_bf_null(const GramStats& stats, const ModelVector& gamma, double g) {
    const int k = gamma.size();
    if (stats.n() < k + 2) {
        throw InsufficientDataError("model with " + std::to_string(k) + " covariates needs n >= " +
                                    std::to_string(k + 2) + ", have " +
                                    std::to_string(stats.n()));
    }
    if (k == 0) return 0.0;
    return log_bf_from_r2(r_squared(stats, gamma), stats.n(), k, g);
}

namespace {

// Depth-first walk over covariate subsets in ascending covariate order. Row
// `depth` of `lower` holds the newest row of the Cholesky factor of the
// centered Gram submatrix; rows above it belong to the ancestors.
class SubsetSweep {
public:
    SubsetSweep(const GramStats& stats, std::vector<double>& r2)
        : cxx_(stats.centered_xx()),
          cxy_(stats.centered_xy()),
          syy_(checked_centered_yy(stats)),
          p_(stats.p()),
          lower_(Eigen::MatrixXd::Zero(p_, p_)),
          z_(Eigen::VectorXd::Zero(p_)),
          r2_(r2) {}

    void run() {
        r2_[0] = 0.0;
        descend(0, 0, 0U, 0.0);
    }

private:
    void descend(int depth, int first, std::uint32_t index, double explained) {
        for (int k = first; k < p_; ++k) {
            // new factor row: l = L^-1 C[S, k]
            double norm2 = 0.0;
            for (int r = 0; r < depth; ++r) {
                double v = cxx_(cols_[static_cast<std::size_t>(r)], k);
                for (int c = 0; c < r; ++c) v -= lower_(r, c) * lower_(depth, c);
                v /= lower_(r, r);
                lower_(depth, r) = v;
                norm2 += v * v;
            }
            if (!(cxx_(k, k) > 0.0)) {
                throw NumericalError("covariate " + std::to_string(k + 1) + " is constant");
            }
            double pivot = cxx_(k, k) - norm2;
            const double floor = kJitter * cxx_(k, k);
            if (!(pivot > floor)) pivot = std::max(pivot, 0.0) + floor;
            lower_(depth, depth) = std::sqrt(pivot);

            double zk = cxy_(k);
            for (int c = 0; c < depth; ++c) zk -= lower_(depth, c) * z_(c);
            zk /= lower_(depth, depth);
            z_(depth) = zk;

            const double child = explained + zk * zk;
            const std::uint32_t child_index = index | (1U << k);
            r2_[child_index] = clamp_r2(child / syy_);

            cols_[static_cast<std::size_t>(depth)] = k;
            descend(depth + 1, k + 1, child_index, child);
        }
    }

    Eigen::MatrixXd cxx_;
    Eigen::VectorXd cxy_;
    double syy_;
    int p_;
    Eigen::MatrixXd lower_;
    Eigen::VectorXd z_;
    std::array<int, kMaxCovariates> cols_{};
    std::vector<double>& r2_;
};

}  // namespace

std::vector<double> r_squared_sweep(const GramStats& stats, const ModelSpace& space) {
    if (space.p() != stats.p()) throw ShapeError("model space and statistics disagree on p");
    if (stats.n() < 2) throw InsufficientDataError("R^2 needs at least two observations");
    std::vector<double> r2(space.size(), 0.0);
    SubsetSweep(stats, r2).run();
    return r2;
}

std::vector<double> model_sweep(const GramStats& stats, const ModelSpace& space, double g) {
    const int k_max = space.p();
    if (stats.n() < k_max + 2) {
        throw InsufficientDataError("full model sweep needs n >= " + std::to_string(k_max + 2) +
                                    ", have " + std::to_string(stats.n()));
    }
    const auto r2 = r_squared_sweep(stats, space);
    std::vector<double> out(space.size());
    out[0] = 0.0;
    for (std::size_t i = 1; i < out.size(); ++i) {
        const int k = std::popcount(static_cast<std::uint32_t>(i));
        out[i] = log_bf_from_r2(r2[i], stats.n(), k, g);
    }
    return out;
}

std::vector<double> average_over_imputations(std::span<const std::vector<double>> tables) {
    if (tables.empty()) throw ShapeError("need at least one imputation table");
    const std::size_t m = tables.front().size();
    for (const auto& t : tables) {
        if (t.size() != m) throw ShapeError("imputation tables differ in length");
    }
    if (tables.size() == 1) return tables.front();

    const double log_count = std::log(static_cast<double>(tables.size()));
    std::vector<double> column(tables.size());
    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t t = 0; t < tables.size(); ++t) column[t] = tables[t][i];
        out[i] = log_sum_exp(column) - log_count;
    }
    return out;
}

ModelPrior parse_model_prior(std::string_view name) {
    if (name == "uniform") return ModelPrior::uniform;
    if (name == "scott_berger") return ModelPrior::scott_berger;
    throw ConfigError("unknown model prior '" + std::string(name) + "'");
}

std::string_view to_string(ModelPrior prior) noexcept {
    return prior == ModelPrior::uniform ? "uniform" : "scott_berger";
}

std::vector<double> log_model_prior(const ModelSpace& space, ModelPrior prior) {
    std::vector<double> out(space.size());
    const double p = static_cast<double>(space.p());
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (prior == ModelPrior::uniform) {
            out[i] = -p * std::log(2.0);
        } else {
            const double k = std::popcount(static_cast<std::uint32_t>(i));
            const double log_choose = std::lgamma(p + 1) - std::lgamma(k + 1) - std::lgamma(p - k + 1);
            out[i] = -std::log(p + 1) - log_choose;
        }
    }
    return out;
}

std::vector<double> posterior_model_probs(std::span<const double> log_bf, const ModelSpace& space,
                                          ModelPrior prior) {
    if (log_bf.size() != space.size()) throw ShapeError("log BF vector does not match model space");
    for (double v : log_bf) {
        if (!std::isfinite(v)) throw DataError("non-finite log Bayes factor");
    }
    const auto log_prior = log_model_prior(space, prior);
    std::vector<double> out(log_bf.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = log_bf[i] + log_prior[i];
    const double log_norm = log_sum_exp(out);
    for (double& v : out) v = std::exp(v - log_norm);
    return out;
}

}  // namespace sbvs
