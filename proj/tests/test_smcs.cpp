#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/QR>

#include "oracles/literal_eprocess.hpp"
#include "sbvs/errors.hpp"
#include "sbvs/random.hpp"
#include "sbvs/smcs.hpp"

using namespace sbvs;

namespace {

std::vector<std::vector<double>> random_history(std::size_t t, std::size_t m, Rng& rng, double scale) {
    std::normal_distribution<double> normal(0.0, scale);
    std::vector<std::vector<double>> h(t, std::vector<double>(m));
    for (auto& row : h) {
        for (auto& v : row) v = normal(rng);
    }
    return h;
}

EProcessState run(const std::vector<std::vector<double>>& history, const SmcsConfig& cfg) {
    auto state = EProcessState::fresh(history.front().size());
    for (std::size_t s = 0; s < history.size(); ++s) {
        state = step(std::move(state), LossRecord{static_cast<long>(s + 1), history[s]}, cfg);
    }
    return state;
}

}  // namespace

TEST_CASE("loss from log marginals") {
    auto rec = loss_from_log_marginals(std::vector<double>{0.0, std::log(4.0)}, 3);
    CHECK(rec.t == 3);
    CHECK(rec.losses[0] == doctest::Approx(std::log(4.0)));
    CHECK(rec.losses[1] == doctest::Approx(-std::log(4.0)));
    rec = loss_from_log_marginals(std::vector<double>{1.0, 1.0, 1.0, 1.0}, 1);
    for (double v : rec.losses) CHECK(v == 0.0);
    CHECK_THROWS_AS(loss_from_log_marginals(std::vector<double>{0.0}, 1), ConfigError);
}

TEST_CASE("closed-form loss equals the pairwise average") {
    Rng rng(1);
    std::normal_distribution<double> normal(0.0, 20.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> l(2 + static_cast<std::size_t>(trial % 30));
        for (auto& v : l) v = normal(rng);
        const auto rec = loss_from_log_marginals(l, 1);
        const double m = static_cast<double>(l.size());
        for (std::size_t i = 0; i < l.size(); ++i) {
            double naive = 0.0;
            for (std::size_t j = 0; j < l.size(); ++j) {
                if (j != i) naive += l[j] - l[i];
            }
            naive /= (m - 1.0);
            CHECK(std::abs(rec.losses[i] - naive) <= 1e-12 * std::max(1.0, std::abs(naive)));
        }
        // loss differences are scaled log Bayes factors
        const double diff = rec.losses[0] - rec.losses[1];
        const double want = (m / (m - 1.0)) * (l[1] - l[0]);
        CHECK(std::abs(diff - want) <= 1e-12 * std::max(1.0, std::abs(want)));
    }
}

TEST_CASE("two-model hand case") {
    const auto cfg = SmcsConfig::from_lambda(0.1, 1.0);
    const std::vector<std::vector<double>> history{{0.0, 1.0}, {0.0, 1.0}};
    const auto state = run(history, cfg);
    CHECK(state.log_sup[0] == doctest::Approx(-1.125).epsilon(1e-14));
    CHECK(state.log_sup[1] == doctest::Approx(1.75).epsilon(1e-14));
    CHECK(std::exp(state.log_sup[1]) == doctest::Approx(5.754603).epsilon(1e-6));
    CHECK(state.member[0] == 1);
    CHECK(state.member[1] == 1);  // 5.75 < 10

    auto pw = PairwiseEProcessState::fresh(2);
    for (const auto& row : history) pw = step_pairwise(std::move(pw), pairwise_differences(row), cfg);
    CHECK(pw.log_sup[0] == doctest::Approx(-1.125).epsilon(1e-14));
    CHECK(pw.log_sup[1] == doctest::Approx(1.75).epsilon(1e-14));
}

TEST_CASE("lambda zero never excludes") {
    Rng rng(2);
    const auto history = random_history(200, 6, rng, 50.0);
    const auto state = run(history, SmcsConfig::from_lambda(0.1, 0.0));
    CHECK(confidence_set(state).size() == 6);
    for (double v : state.log_sup) CHECK(v == doctest::Approx(-0.125));
}

TEST_CASE("optimized step matches literal recomputation") {
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = 2 + static_cast<std::size_t>(trial % 15);
        const std::size_t t = 1 + static_cast<std::size_t>(trial * 7 % 30);
        const auto history = random_history(t, m, rng, 1.0 + trial);
        const auto cfg = SmcsConfig::from_varsigma(0.1, 0.65);
        const auto state = run(history, cfg);
        const auto want = oracle::literal_log_e(history, cfg.lambda);
        for (std::size_t i = 0; i < m; ++i) {
            CHECK(std::abs(state.log_sup[i] - want[i]) <= 1e-9 * std::max(1.0, std::abs(want[i])));
        }
    }
}

TEST_CASE("pairwise step matches the per-model step and its literal oracle") {
    Rng rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t m = 2 + static_cast<std::size_t>(trial);
        const auto history = random_history(25, m, rng, 2.0);
        const auto cfg = SmcsConfig::from_varsigma(0.1, 0.65);
        auto pw = PairwiseEProcessState::fresh(m);
        std::vector<Eigen::MatrixXd> diffs;
        for (const auto& row : history) {
            diffs.push_back(pairwise_differences(row));
            pw = step_pairwise(std::move(pw), diffs.back(), cfg);
        }
        const auto state = run(history, cfg);
        const auto want = oracle::literal_log_e_pairwise(diffs, cfg.lambda);
        for (std::size_t i = 0; i < m; ++i) {
            CHECK(std::abs(pw.log_sup[i] - state.log_sup[i]) <= 1e-9 * std::max(1.0, std::abs(want[i])));
            CHECK(std::abs(pw.log_sup[i] - want[i]) <= 1e-9 * std::max(1.0, std::abs(want[i])));
        }
        CHECK(confidence_set(pw) == confidence_set(state));
    }
}

TEST_CASE("huge losses stay finite in log space") {
    const auto cfg = SmcsConfig::from_lambda(0.1, 1.0);
    auto state = EProcessState::fresh(3);
    state = step(std::move(state), LossRecord{1, {0.0, 5000.0, -5000.0}}, cfg);
    for (double v : state.log_sup) CHECK(std::isfinite(v));
    CHECK(confidence_set(state) == std::vector<std::size_t>{2});
}

TEST_CASE("sequencing and input errors") {
    const SmcsConfig cfg;
    auto state = EProcessState::fresh(3);
    CHECK_THROWS_AS(step(state, LossRecord{2, {0.0, 0.0, 0.0}}, cfg), SequencingError);
    CHECK_THROWS_AS(step(state, LossRecord{0, {0.0, 0.0, 0.0}}, cfg), SequencingError);
    CHECK_THROWS_AS(step(state, LossRecord{1, {0.0, 0.0}}, cfg), ShapeError);
    CHECK_THROWS_AS(step(state, LossRecord{1, {0.0, NAN, 0.0}}, cfg), DataError);
    state = step(state, LossRecord{1, {0.0, 0.0, 0.0}}, cfg);
    CHECK_THROWS_AS(step(state, LossRecord{1, {0.0, 0.0, 0.0}}, cfg), SequencingError);

    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
    d(0, 1) = 1.0;
    d(1, 0) = -0.5;
    CHECK_THROWS_AS(step_pairwise(PairwiseEProcessState::fresh(3), d, cfg), DataError);
}

TEST_CASE("config validation") {
    CHECK_NOTHROW(SmcsConfig{}.validate());
    CHECK(SmcsConfig{}.lambda == doctest::Approx(1.0 / (8.0 * 0.65 * 0.65)));
    CHECK_THROWS_AS(SmcsConfig::from_varsigma(0.0, 0.65).validate(), ConfigError);
    CHECK_THROWS_AS(SmcsConfig::from_varsigma(1.0, 0.65).validate(), ConfigError);
    CHECK_THROWS_AS(SmcsConfig::from_lambda(0.1, -1.0).validate(), ConfigError);
    SmcsConfig bad;
    bad.lambda = 3.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK(SmcsConfig{}.log_threshold() == doctest::Approx(std::log(10.0)));
}

TEST_CASE("l2 predictive loss") {
    Rng rng(5);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd X(20, 3);
    for (Eigen::Index j = 0; j < X.size(); ++j) X.data()[j] = normal(rng);
    const Eigen::VectorXd exact = (1.5 + (X.col(0) * 2.0 - X.col(2)).array()).matrix();
    const std::vector<double> x_t{0.3, -0.2, 1.1};
    const double y_t = 1.5 + 0.6 - 1.1;
    const auto gamma = ModelVector::from_bits({1, 0, 1});
    CHECK(l2_predictive_loss(X, exact, x_t, y_t, gamma) < 1e-20);

    Eigen::VectorXd y(20);
    for (auto& v : y) v = normal(rng);
    const double null_loss = l2_predictive_loss(X, y, x_t, 0.7, ModelVector(3, 0));
    CHECK(null_loss == doctest::Approx(std::pow(0.7 - y.mean(), 2)).epsilon(1e-12));

    // normal-equation oracle
    const auto full = ModelVector::from_bits({1, 1, 1});
    Eigen::MatrixXd Z(20, 4);
    Z.col(0).setOnes();
    Z.rightCols(3) = X;
    const Eigen::VectorXd b = (Z.transpose() * Z).ldlt().solve(Z.transpose() * y);
    const double pred = b(0) + 0.3 * b(1) - 0.2 * b(2) + 1.1 * b(3);
    CHECK(std::abs(l2_predictive_loss(X, y, x_t, 0.7, full) - std::pow(0.7 - pred, 2)) < 1e-10);

    CHECK_THROWS_AS(l2_predictive_loss(X.topRows(4), y.head(4), x_t, 0.7, full), InsufficientDataError);
}

TEST_CASE("permutation equivariance") {
    Rng rng(6);
    const auto history = random_history(30, 7, rng, 1.5);
    std::vector<std::size_t> perm(7);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    auto permuted = history;
    for (std::size_t s = 0; s < history.size(); ++s) {
        for (std::size_t i = 0; i < 7; ++i) permuted[s][i] = history[s][perm[i]];
    }
    const SmcsConfig cfg;
    const auto a = run(history, cfg);
    const auto b = run(permuted, cfg);
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(std::abs(b.log_sup[i] - a.log_sup[perm[i]]) <= 1e-12 * std::max(1.0, std::abs(a.log_sup[perm[i]])));
        CHECK(b.member[i] == a.member[perm[i]]);
    }
}

TEST_CASE("sets are nested and log sup is monotone") {
    Rng rng(7);
    const auto history = random_history(100, 12, rng, 1.0);
    const auto cfg = SmcsConfig::from_varsigma(0.1, 0.3);
    auto state = EProcessState::fresh(12);
    std::size_t excluded_somewhere = 0;
    for (std::size_t s = 0; s < history.size(); ++s) {
        const auto prev = state;
        state = step(state, LossRecord{static_cast<long>(s + 1), history[s]}, cfg);
        for (std::size_t i = 0; i < 12; ++i) {
            CHECK(state.log_sup[i] >= prev.log_sup[i]);
            CHECK(state.member[i] <= prev.member[i]);
            CHECK((state.member[i] == 1) == (state.log_sup[i] <= cfg.log_threshold()));
        }
    }
    for (auto v : state.member) excluded_somewhere += v == 0;
    CHECK(excluded_somewhere > 0);
}

TEST_CASE("true model rarely excluded under sub-Gaussian losses") {
    const double varsigma = 0.65;
    const auto cfg = SmcsConfig::from_varsigma(0.1, varsigma);
    Rng rng(8);
    std::normal_distribution<double> normal(0.0, varsigma / std::sqrt(2.0));
    const int trajectories = 200;
    const std::size_t m = 8;
    int excluded = 0;
    int others_excluded = 0;
    for (int r = 0; r < trajectories; ++r) {
        auto state = EProcessState::fresh(m);
        for (long t = 1; t <= 100; ++t) {
            LossRecord rec{t, std::vector<double>(m)};
            for (std::size_t i = 0; i < m; ++i) rec.losses[i] = (i == 0 ? 0.0 : 1.0) + normal(rng);
            state = step(std::move(state), rec, cfg);
        }
        excluded += state.member[0] == 0;
        others_excluded += state.member[1] == 0;
    }
    const double rate = static_cast<double>(excluded) / trajectories;
    CHECK(rate <= 0.1 + 3.0 * std::sqrt(0.09 / trajectories));
    CHECK(others_excluded > trajectories / 2);
}

TEST_CASE("loss mode names") {
    CHECK(parse_loss_mode("cumulative") == LossMode::cumulative);
    CHECK(parse_loss_mode("increment") == LossMode::increment);
    CHECK(to_string(LossMode::increment) == "increment");
    CHECK_THROWS_AS(parse_loss_mode("other"), ConfigError);
}
