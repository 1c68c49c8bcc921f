#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "sbvs/errors.hpp"
#include "sbvs/inclusion.hpp"
#include "sbvs/random.hpp"

using namespace sbvs;

namespace {

std::vector<std::size_t> all_models(const ModelSpace& space) {
    std::vector<std::size_t> v(space.size());
    std::iota(v.begin(), v.end(), 0);
    return v;
}

std::vector<double> random_posterior(std::size_t m, Rng& rng) {
    std::exponential_distribution<double> e;
    std::vector<double> v(m);
    double total = 0.0;
    for (auto& x : v) total += (x = e(rng));
    for (auto& x : v) x /= total;
    return v;
}

}  // namespace

TEST_CASE("bvs inclusion") {
    const auto s2 = enumerate_models(2);
    const auto p = bvs_inclusion(std::vector<double>{0.1, 0.2, 0.3, 0.4}, s2);
    CHECK(p[0] == doctest::Approx(0.6));
    CHECK(p[1] == doctest::Approx(0.7));

    const auto s10 = enumerate_models(10);
    const std::vector<double> uniform(s10.size(), 1.0 / static_cast<double>(s10.size()));
    for (double v : bvs_inclusion(uniform, s10)) CHECK(v == doctest::Approx(0.5));

    std::vector<double> point(s10.size(), 0.0);
    point[1] = 1.0;
    const auto pi = bvs_inclusion(point, s10);
    CHECK(pi[0] == 1.0);
    for (int k = 1; k < 10; ++k) CHECK(pi[static_cast<std::size_t>(k)] == 0.0);

    CHECK_THROWS_AS(bvs_inclusion(std::vector<double>{0.5, 0.2, 0.1, 0.1}, s2), DataError);
    CHECK_THROWS_AS(bvs_inclusion(std::vector<double>{0.5, 0.5}, s2), ShapeError);
}

TEST_CASE("smcs inclusion") {
    const auto s3 = enumerate_models(3);
    for (double v : smcs_inclusion(all_models(s3), s3)) CHECK(v == 0.5);

    const std::vector<std::size_t> single{ModelVector::from_bits({1, 0, 1}).index()};
    CHECK(smcs_inclusion(single, s3) == std::vector<double>{1.0, 0.0, 1.0});

    for (double v : smcs_inclusion(std::vector<std::size_t>{}, s3)) CHECK(std::isnan(v));
}

TEST_CASE("256-model set with a covariate in half the members") {
    // every model over p = 10 that contains covariates 2 and 7
    const auto space = enumerate_models(10);
    std::vector<std::size_t> set;
    for (std::size_t i = 0; i < space.size(); ++i) {
        const auto g = space[i];
        if (includes(g, 2) && includes(g, 7)) set.push_back(i);
    }
    REQUIRE(set.size() == 256);
    const auto p = smcs_inclusion(set, space);
    CHECK(p[1] == 1.0);
    CHECK(p[6] == 1.0);
    CHECK(p[0] == 0.5);
    CHECK(p[5] == 0.5);
    CHECK(p[2] == 0.5);
}

TEST_CASE("zero_out") {
    const auto s1 = enumerate_models(1);
    const auto r = zero_out(std::vector<double>{0.5, 0.5}, std::vector<std::size_t>{1}, s1);
    CHECK(r.probs == std::vector<double>{1.0});
    CHECK_FALSE(r.fell_back);

    Rng rng(1);
    const auto s4 = enumerate_models(4);
    const auto post = random_posterior(s4.size(), rng);
    const auto full = zero_out(post, all_models(s4), s4);
    const auto bvs = bvs_inclusion(post, s4);
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(full.probs[k] - bvs[k]) <= 1e-12);

    const std::vector<std::size_t> single{ModelVector::from_bits({0, 1, 1, 0}).index()};
    CHECK(zero_out(post, single, s4).probs == std::vector<double>{0.0, 1.0, 1.0, 0.0});

    const auto empty = zero_out(post, std::vector<std::size_t>{}, s4);
    CHECK(empty.fell_back);
    CHECK(empty.probs == bvs);

    std::vector<double> point(s4.size(), 0.0);
    point[0] = 1.0;
    const auto massless = zero_out(point, single, s4);
    CHECK(massless.fell_back);
    CHECK(massless.probs == std::vector<double>{0.0, 0.0, 0.0, 0.0});
}

TEST_CASE("mixed inclusion") {
    const std::vector<double> pb{0.9, 0.2};
    const std::vector<double> nan2{NAN, NAN};
    CHECK(mixed_inclusion(pb, nan2, 0, 4) == pb);
    CHECK(mixed_inclusion(pb, pb, 4, 4) == pb);
    const auto r = mixed_inclusion(std::vector<double>{0.9}, std::vector<double>{0.5}, 2, 4);
    CHECK(r[0] == doctest::Approx(0.7));
    CHECK_THROWS_AS(mixed_inclusion(pb, pb, 5, 4), DataError);
}

TEST_CASE("mixed inclusion lies between its inputs") {
    Rng rng(2);
    std::uniform_real_distribution<double> u;
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> a(5), b(5);
        for (auto& v : a) v = u(rng);
        for (auto& v : b) v = u(rng);
        const std::size_t m = 32;
        const auto size = static_cast<std::size_t>(u(rng) * 33.0) % 33;
        const auto r = mixed_inclusion(a, b, size, m);
        for (std::size_t k = 0; k < 5; ++k) {
            CHECK(r[k] >= std::min(a[k], b[k]) - 1e-15);
            CHECK(r[k] <= std::max(a[k], b[k]) + 1e-15);
        }
    }
}

TEST_CASE("outputs stay in [0, 1] for random posteriors and sets") {
    Rng rng(3);
    const auto space = enumerate_models(6);
    std::bernoulli_distribution keep(0.3);
    for (int trial = 0; trial < 200; ++trial) {
        const auto post = random_posterior(space.size(), rng);
        std::vector<std::size_t> set;
        for (std::size_t i = 0; i < space.size(); ++i) {
            if (keep(rng)) set.push_back(i);
        }
        const auto pb = bvs_inclusion(post, space);
        const auto ps = smcs_inclusion(set, space);
        const auto pz = zero_out(post, set, space).probs;
        const auto pm = mixed_inclusion(pb, ps, set.size(), space.size());
        for (const auto* vec : {&pb, &pz, &pm}) {
            for (double v : *vec) CHECK((v >= 0.0 && v <= 1.0));
        }
        for (double v : ps) CHECK((std::isnan(v) || (v >= 0.0 && v <= 1.0)));
    }
}

TEST_CASE("method names round trip") {
    for (Method m : kMethods) CHECK(parse_method(to_string(m)) == m);
    CHECK_THROWS_AS(parse_method("lasso"), DataError);
}
