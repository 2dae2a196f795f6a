#include <doctest.h>

#include <random>
#include <stdexcept>

#include "qtm/fit.hpp"

using namespace qtm;

TEST_CASE("power-law fit recovers exact data")
{
    std::vector<double> x, y;
    for (int i = 0; i < 12; ++i) {
        x.push_back(std::pow(10.0, 0.2 * i));
        y.push_back(3.5 * std::pow(x.back(), -0.75));
    }
    const ScalingFit f = fit_power_law(x, y);
    CHECK(f.exponent == doctest::Approx(-0.75).epsilon(1e-12));
    CHECK(f.prefactor == doctest::Approx(3.5).epsilon(1e-12));
    CHECK(f.r_squared == doctest::Approx(1.0));
    CHECK(f.decades() == doctest::Approx(2.2));
    CHECK(f.n_points == 12);
    CHECK(f.acceptance_grade());
}

TEST_CASE("power-law fit with noise stays within its scatter")
{
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.0, 0.01);
    std::vector<double> x, y;
    for (int i = 0; i < 30; ++i) {
        x.push_back(std::pow(10.0, 0.1 * i));
        y.push_back(2.0 * std::pow(x.back(), 0.5) * std::exp(g(rng)));
    }
    const ScalingFit f = fit_power_law(x, y);
    CHECK(std::abs(f.exponent - 0.5) < 0.02);
    CHECK(f.r_squared > 0.99);
}

TEST_CASE("fit preconditions")
{
    const std::vector<double> x = {1, 2, 3, 4, 5, 6, 7, 8}, y = {1, 2, 3, 4, 5, 6, 7, 8};
    CHECK_THROWS_AS(fit_power_law(x, y), std::domain_error);  // under 1.5 decades
    CHECK_NOTHROW(fit_power_law(x, y, FitOptions{8, 0.5}));
    CHECK_THROWS_AS(fit_power_law({1, 10, 100}, {1, 2, 3}), std::domain_error);  // too few points
    CHECK_THROWS_AS(fit_power_law({1, 10, 100, 1000}, {1, -2, 3, 4}, FitOptions{4, 1.0}), std::domain_error);
}

TEST_CASE("fixed and co-fitted offsets")
{
    std::vector<double> x, y;
    for (int i = 0; i < 10; ++i) {
        x.push_back(std::pow(10.0, 0.25 * i));
        y.push_back(-40.0 + 12.0 * std::pow(x.back(), -0.5));
    }
    const ScalingFit f = fit_power_law(x, y, -40.0, {});
    CHECK(f.exponent == doctest::Approx(-0.5).epsilon(1e-10));
    const OffsetScalingFit c = fit_power_law_cofit(x, y, -100.0);
    CHECK(c.offset == doctest::Approx(-40.0).epsilon(1e-4));
    CHECK(c.fit.exponent == doctest::Approx(-0.5).epsilon(1e-3));
    CHECK_THROWS(fit_power_law(x, y, 0.0, {}));  // offset above the data
}

TEST_CASE("linear fit and golden-section search")
{
    const LinearFit l = fit_linear({0, 1, 2, 3}, {1, 3, 5, 7});
    CHECK(l.slope == doctest::Approx(2.0));
    CHECK(l.intercept == doctest::Approx(1.0));
    CHECK(l.r_squared == doctest::Approx(1.0));
    CHECK(golden_max([](double v) { return -(v - 0.3) * (v - 0.3); }, 0.0, 1.0, 1e-10) == doctest::Approx(0.3).epsilon(1e-7));
}
