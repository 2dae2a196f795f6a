#include <doctest.h>

#include <random>

#include "qtm/collective_otto.hpp"

using namespace qtm;

namespace {

double mean_m(double j, double x)
{
    double z = 0.0, s = 0.0;
    for (double m = -j; m <= j + 1e-9; m += 1.0) {
        const double w = std::exp(-x * m);
        z += w;
        s += m * w;
    }
    return s / z;
}

CollectiveOttoSpec random_spec(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    CollectiveOttoSpec s;
    s.ensemble = {1 + int(rng() % 12), 0.5 * double(1 + rng() % 3), 1.0};
    s.vartheta_c = 0.1 + u(rng);
    s.vartheta_h = s.vartheta_c * (1.0 + 3.0 * u(rng));
    s.beta_h = 0.01 + 2.0 * u(rng);
    s.beta_c = s.beta_h * (1.0 + 10.0 * u(rng));
    s.coupling = rng() % 2 ? Coupling::collective : Coupling::independent;
    return s;
}

}  // namespace

TEST_CASE("steady cycle work against direct Gibbs sums")
{
    CollectiveOttoSpec s;
    s.ensemble = {6, 0.5, 1.0};
    s.vartheta_c = 0.5;
    s.vartheta_h = 1.0;
    s.beta_c = 3.0;
    s.beta_h = 0.4;
    const double j = 3.0;
    const double mc = mean_m(j, s.beta_c * s.vartheta_c), mh = mean_m(j, s.beta_h * s.vartheta_h);
    const CycleOutcome c = steady_cycle_work(s);
    CHECK(c.work == doctest::Approx((s.vartheta_h - s.vartheta_c) * (mc - mh)));
    CHECK(c.heat_hot == doctest::Approx(s.vartheta_h * (mh - mc)));

    s.coupling = Coupling::independent;
    const double ic = mean_m(0.5, s.beta_c * s.vartheta_c), ih = mean_m(0.5, s.beta_h * s.vartheta_h);
    CHECK(steady_cycle_work(s).work == doctest::Approx(6.0 * (s.vartheta_h - s.vartheta_c) * (ic - ih)));
}

TEST_CASE("high-temperature work ratio approaches (Ns+1)/(s+1)")
{
    for (double spin : {0.5, 1.0})
        for (int n : {2, 5, 20}) {
            CollectiveOttoSpec s;
            s.ensemble = {n, spin, 1.0};
            s.beta_h = 1e-4;
            s.beta_c = 4e-4;
            const double wc = steady_cycle_work(s).work;
            s.coupling = Coupling::independent;
            const double wi = steady_cycle_work(s).work;
            CHECK(wc / wi == doctest::Approx((n * spin + 1.0) / (spin + 1.0)).epsilon(1e-3));
        }
}

TEST_CASE("property: random steady and finite cycles close the first law and respect Carnot")
{
    std::mt19937_64 rng(17);
    for (int t = 0; t < 200; ++t) {
        const CollectiveOttoSpec s = random_spec(rng);
        const CycleOutcome c = steady_cycle_work(s);
        CHECK(c.first_law_ok());
        if (c.is_engine()) CHECK(c.efficiency <= 1.0 - s.beta_h / s.beta_c + 1e-12);
        if (t % 10 == 0) {
            const OttoRun run = finite_time_cycle(s, 0.3, 0.3);
            if (run.converged) {
                CHECK(run.limit().first_law_ok());
                if (run.limit().is_engine()) CHECK(run.limit().efficiency <= 1.0 - s.beta_h / s.beta_c + 1e-12);
            }
        }
    }
}

TEST_CASE("long bath strokes reproduce the steady cycle")
{
    CollectiveOttoSpec s;
    s.ensemble = {4, 0.5, 1.0};
    s.beta_c = 2.0;
    s.beta_h = 0.5;
    const OttoRun run = finite_time_cycle(s, 40.0, 40.0);
    REQUIRE(run.converged);
    CHECK(run.limit().work == doctest::Approx(steady_cycle_work(s).work).epsilon(1e-8));
    const OttoRun inf = finite_time_cycle(s, INFINITY, INFINITY);
    CHECK(inf.limit().work == doctest::Approx(steady_cycle_work(s).work).epsilon(1e-12));
}

TEST_CASE("spec validation")
{
    CollectiveOttoSpec s;
    s.beta_c = s.beta_h;
    CHECK_THROWS(s.validate());
    s = {};
    s.block_weights = {0.5, 0.4};
    CHECK_THROWS(s.validate());
    s = {};
    s.vartheta_c = 0.0;
    CHECK_THROWS(s.validate());
}
