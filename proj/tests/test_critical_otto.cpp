#include <doctest.h>

#include "qtm/critical_otto.hpp"

using namespace qtm;

TEST_CASE("critical cycle closes the first law and approaches the adiabatic limit")
{
    CriticalCycleSpec s;
    s.chain = {40, 1.0};
    const CycleOutcome ad = adiabatic_cycle(s);
    CHECK(ad.is_engine());
    double prev = INFINITY;
    for (double tau : {10.0, 100.0, 1000.0}) {
        s.tau1 = tau;
        const CycleOutcome c = run_critical_cycle(s);
        CHECK(c.first_law_ok());
        CHECK(c.cycle_time == doctest::Approx(tau + s.tau2));
        const double excess = c.work - ad.work;
        CHECK(excess > 0.0);
        CHECK(excess < prev);
        prev = excess;
    }
}

TEST_CASE("serial and parallel cycle evaluation agree")
{
    CriticalCycleSpec s;
    s.chain = {60, 1.0};
    s.tau1 = 30.0;
    CHECK(run_critical_cycle(s, Exec::serial).work == run_critical_cycle(s, Exec::parallel).work);
    const Tau1Sweep a = sweep_tau1(s, {10.0, 20.0}, Exec::serial), b = sweep_tau1(s, {10.0, 20.0}, Exec::parallel);
    CHECK(a.cycles[1].work == b.cycles[1].work);
}

TEST_CASE("scaling helpers on synthetic data")
{
    Tau1Sweep sw;
    const double w_inf = -50.0, R = 30.0;
    sw.tau1 = log_grid(10.0, 1000.0, 9);
    for (double t : sw.tau1) {
        CycleOutcome c;
        c.work = w_inf + R / std::sqrt(t);
        sw.cycles.push_back(c);
    }
    const ScalingFit f = work_scaling(sw, w_inf);
    CHECK(f.exponent == doctest::Approx(-0.5).epsilon(1e-10));
    CHECK(work_prefactor(sw, w_inf, -0.5) == doctest::Approx(R).epsilon(1e-10));
    CHECK(optimal_tau_closed_form(R, w_inf, 1) == doctest::Approx(std::pow(1.5 * R / 50.0, 2.0)));
    CHECK(optimal_tau_closed_form(R, w_inf, 2) == doctest::Approx(2.0 * R / 50.0));
    CHECK_THROWS(optimal_tau_closed_form(R, w_inf, 3));
    CHECK(efficiency_at_max_power(-10.0, 40.0, 0.0) == doctest::Approx(0.25));

    // maximizing P(tau) = -(w_inf + R tau^-1/2) / tau on a fine grid gives the closed form
    double best = 0.0, pbest = -INFINITY;
    for (double lt = -3.0; lt < 6.0; lt += 1e-5) {
        const double t = std::exp(lt), p = -(w_inf + R / std::sqrt(t)) / t;
        if (p > pbest) {
            pbest = p;
            best = t;
        }
    }
    CHECK(best == doctest::Approx(optimal_tau_closed_form(R, w_inf, 1)).epsilon(1e-4));

    const auto g = log_grid(1.0, 100.0, 3);
    CHECK(g[1] == doctest::Approx(10.0));
    CHECK_THROWS(log_grid(0.0, 1.0, 3));
}

TEST_CASE("maximum efficiency against a direct mode scan")
{
    for (int n : {50, 100}) {
        const TfimSpec chain{n, 1.0};
        double best = -INFINITY;
        for (int m = 1; m <= n / 2; ++m) {
            const double k = (2 * m - 1) * M_PI / n;
            const double ea = 2 * std::sqrt(1.0 + 1.0 + 2.0 * std::cos(k));
            const double eb = 2 * std::sqrt(70.0 * 70.0 + 1.0 + 140.0 * std::cos(k));
            best = std::max(best, 1.0 - ea / eb);
        }
        CHECK(max_efficiency(chain, 1.0, 70.0) == doctest::Approx(best).epsilon(1e-12));
    }
    const ScalingFit f = max_efficiency_scaling({50, 100, 200, 400}, 1.0, 70.0, {4, 0.9});
    CHECK(f.exponent == doctest::Approx(-1.0).epsilon(0.15));
}

TEST_CASE("spec validation")
{
    CriticalCycleSpec s;
    s.tau1 = -1.0;
    CHECK_THROWS(s.validate());
    s = {};
    s.q_energizing = 1.5;
    CHECK_THROWS(s.validate());
    s = {};
    CHECK_FALSE(s.ends_at_critical_point());
    s.h_b = 1.0;
    CHECK(s.ends_at_critical_point());
}
