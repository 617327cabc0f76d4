#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "wgf/measure.hpp"

using namespace wgf;

TEST_CASE("domain construction and membership") {
    Domain line = Domain::line();
    CHECK(!line.bounded);
    CHECK(line.contains(1e300));

    Domain box = Domain::interval(-1.0, 2.0);
    CHECK(box.bounded);
    CHECK(box.contains(-1.0));
    CHECK(box.contains(2.0));
    CHECK(!box.contains(2.0000001));

    CHECK_THROWS_AS(Domain::interval(1.0, 1.0), DegenerateInputError);
    CHECK_THROWS_AS(Domain::interval(2.0, 1.0), DegenerateInputError);
    double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(Domain::interval(0.0, inf), NonFiniteError);
}

TEST_CASE("quantile grid bookkeeping") {
    QuantileMeasure mu = from_quantiles({0.0, 0.5, 1.0}, Domain::line());
    CHECK(mu.size() == 3);
    CHECK(mu.delta() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(mu.level(0) == 0.0);
    CHECK(mu.level(1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(mu.level(2) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(mu.weight(0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(mu.weight(1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(mu.weight(2) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(!mu.has_atom());

    double total = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) total += mu.weight(i);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-15));

    QuantileMeasure atom = from_quantiles({0.0, 0.0, 1.0}, Domain::line());
    CHECK(atom.has_atom());
}

TEST_CASE("position validation") {
    CHECK_THROWS_AS(from_quantiles({1.0, 0.0}, Domain::line()), NonMonotoneError);
    CHECK_THROWS_AS(from_quantiles({0.0}, Domain::line()), DegenerateInputError);
    double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(from_quantiles({0.0, nan}, Domain::line()), NonFiniteError);
    CHECK_THROWS_AS(from_quantiles({0.0, 3.0}, Domain::interval(0.0, 2.0)),
                    OutOfDomainError);
    CHECK_NOTHROW(from_quantiles({0.0, 2.0}, Domain::interval(0.0, 2.0)));
}

TEST_CASE("from_density inverts a linear ramp") {
    // density 2x on [0,1] has quantile sqrt(s)
    auto ramp = [](double x) { return 2.0 * x; };
    QuantileMeasure mu = from_density(ramp, Domain::interval(0.0, 1.0), 3);
    CHECK(mu.position(0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(mu.position(1) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
    CHECK(mu.position(2) == doctest::Approx(1.0).epsilon(1e-9));

    QuantileMeasure fine = from_density(ramp, Domain::interval(0.0, 1.0), 9);
    for (std::size_t i = 0; i < fine.size(); ++i)
        CHECK(fine.position(i) ==
              doctest::Approx(std::sqrt(fine.level(i))).epsilon(1e-6));
}

TEST_CASE("from_density rejects bad inputs") {
    auto half = [](double x) { return x; }; // mass 1/2 on [0,1]
    CHECK_THROWS_AS(from_density(half, Domain::interval(0.0, 1.0), 5),
                    MassNotOneError);
    auto neg = [](double) { return -1.0; };
    CHECK_THROWS_AS(from_density(neg, Domain::interval(0.0, 1.0), 5),
                    NegativeDensityError);
    auto flat = [](double) { return 1.0; };
    CHECK_THROWS_AS(from_density(flat, Domain::line(), 5), DegenerateInputError);
    CHECK_THROWS_AS(from_density(flat, Domain::interval(0.0, 1.0), 1),
                    DegenerateInputError);
    CHECK_NOTHROW(from_density(flat, Domain::line(), 5,
                               std::make_pair(0.0, 1.0)));
}

TEST_CASE("second moment of the uniform grid") {
    // trapezoidal sum of s^2 equals 1/3 + delta^2/6 exactly
    for (std::size_t n : {3u, 5u, 17u}) {
        std::vector<double> pos(n);
        double d = 1.0 / double(n - 1);
        for (std::size_t i = 0; i < n; ++i) pos[i] = double(i) * d;
        QuantileMeasure mu = from_quantiles(pos, Domain::line());
        CHECK(second_moment(mu) ==
              doctest::Approx(1.0 / 3.0 + d * d / 6.0).epsilon(1e-14));
    }
}

TEST_CASE("density reconstruction of the uniform measure") {
    QuantileMeasure mu = from_quantiles({0.0, 0.5, 1.0}, Domain::line());
    PiecewiseDensity rho = reconstruct_density(mu);
    REQUIRE(rho.breaks.size() == 3);
    REQUIRE(rho.values.size() == 2);
    CHECK(rho.values[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rho.values[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rho.integral() == doctest::Approx(1.0).epsilon(1e-14));

    QuantileMeasure atom = from_quantiles({0.0, 0.0, 1.0}, Domain::line());
    CHECK_THROWS_AS(reconstruct_density(atom), ZeroGapError);
}

TEST_CASE("reconstruction carries unit mass on random measures") {
    testsup::Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        QuantileMeasure mu = testsup::random_measure(rng, 40);
        CHECK(reconstruct_density(mu).integral() ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}
