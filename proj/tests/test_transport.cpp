#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "test_support.hpp"
#include "wgf/transport.hpp"

using namespace wgf;

TEST_CASE("distance between shifted two-node measures") {
    QuantileMeasure mu = from_quantiles({0.0, 2.0}, Domain::line());
    QuantileMeasure nu = from_quantiles({0.0, 4.0}, Domain::line());
    // 0.5 * 0 + 0.5 * 4 = 2
    CHECK(w2(mu, nu) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(w2(mu, mu) == 0.0);

    QuantileMeasure other = from_quantiles({0.0, 1.0, 2.0}, Domain::line());
    CHECK_THROWS_AS(w2(mu, other), GridMismatchError);
}

TEST_CASE("translation moves the distance by the shift") {
    testsup::Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> pos = testsup::random_positions(rng, 30);
        std::vector<double> shifted = pos;
        double c = rng.uniform(-3.0, 3.0);
        for (double& p : shifted) p += c;
        QuantileMeasure mu = from_quantiles(pos, Domain::line());
        QuantileMeasure nu = from_quantiles(shifted, Domain::line());
        CHECK(w2(mu, nu) == doctest::Approx(std::abs(c)).epsilon(1e-12));
    }
}

TEST_CASE("plan pairs nodes in order and reports the squared cost") {
    QuantileMeasure mu = from_quantiles({0.0, 1.0, 3.0}, Domain::line());
    QuantileMeasure nu = from_quantiles({1.0, 2.0, 5.0}, Domain::line());
    MonotonePlan plan = monotone_plan(mu, nu);
    REQUIRE(plan.pairs.size() == 3);
    CHECK(plan.pairs[0].first == 0.0);
    CHECK(plan.pairs[0].second == 1.0);
    CHECK(plan.pairs[2].first == 3.0);
    CHECK(plan.pairs[2].second == 5.0);
    double d = w2(mu, nu);
    CHECK(plan.cost == doctest::Approx(d * d).epsilon(1e-14));
}

TEST_CASE("metric axioms over random instances") {
    testsup::Rng rng(31);
    for (int trial = 0; trial < 1000; ++trial) {
        QuantileMeasure a = testsup::random_measure(rng, 50);
        QuantileMeasure b = testsup::random_measure(rng, 50);
        QuantileMeasure c = testsup::random_measure(rng, 50);
        double ab = w2(a, b), ba = w2(b, a), ac = w2(a, c), bc = w2(b, c);
        CHECK(ab == ba);
        CHECK(ab >= 0.0);
        CHECK(w2(a, a) == 0.0);
        CHECK(ac <= ab + bc + 1e-12);
    }
}

TEST_CASE("binomial and moment-distance margins are non-negative") {
    testsup::Rng rng(41);
    for (int trial = 0; trial < 1000; ++trial) {
        QuantileMeasure eta = testsup::random_measure(rng, 50);
        QuantileMeasure nu = testsup::random_measure(rng, 50);
        QuantileMeasure rho = testsup::random_measure(rng, 50);
        double slack = 1e-12 * (1.0 + second_moment(eta) + second_moment(nu) +
                                second_moment(rho));
        CHECK(check_triangle_binomial(eta, nu, rho) >= -slack);
        auto [lo, hi] = check_moment_distance_bound(rho, nu);
        CHECK(lo >= -slack);
        CHECK(hi >= -slack);
    }
}

TEST_CASE("moment-distance margins on a frozen point pair") {
    QuantileMeasure rho = from_quantiles({3.0, 3.0, 3.0, 3.0}, Domain::line());
    QuantileMeasure nu = from_quantiles({1.0, 1.0, 1.0, 1.0}, Domain::line());
    // M2(rho) = 9, M2(nu) = 1, w2^2 = 4
    auto [lo, hi] = check_moment_distance_bound(rho, nu);
    CHECK(lo == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(hi == doctest::Approx(25.0).epsilon(1e-14));
}

TEST_CASE("sorted pairing beats every permutation under uniform weights") {
    testsup::Rng rng(51);
    for (std::size_t n = 2; n <= 6; ++n) {
        for (int trial = 0; trial < 40; ++trial) {
            std::vector<double> x(n), y(n);
            for (std::size_t i = 0; i < n; ++i) {
                x[i] = rng.uniform(-5.0, 5.0);
                y[i] = rng.uniform(-5.0, 5.0);
            }
            std::sort(x.begin(), x.end());
            std::sort(y.begin(), y.end());
            auto cost = [&](const std::vector<double>& perm) {
                double c = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    c += (x[i] - perm[i]) * (x[i] - perm[i]);
                return c;
            };
            double sorted_cost = cost(y);
            std::vector<double> perm = y;
            do {
                CHECK(cost(perm) >= sorted_cost - 1e-12);
            } while (std::next_permutation(perm.begin(), perm.end()));
        }
    }
}
