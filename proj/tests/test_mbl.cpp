#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <random>

#include "qtm/mbl.hpp"
#include "qtm/rng.hpp"

using namespace qtm;

namespace {

template <class F>
double simpson(F f, double a, double b, int n = 20000)
{
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

// mean work and hot heat per cycle at infinite hot temperature, subengine weight 2
std::pair<double, double> quadrature_cycle(const MblCycleParams& p)
{
    const double mean_hot = p.mean_gap;  // the surmise mean equals the mean gap
    auto occupation_shift = [&](double d) { return 1.0 / (1.0 + std::exp(p.beta_c * d)) - 0.5; };
    auto density = [&](double d) { return std::exp(-d / p.mean_gap) / p.mean_gap; };
    const double w = 2.0 * simpson([&](double d) { return density(d) * (mean_hot - d) * occupation_shift(d); }, 0.0,
                                   p.bandwidth);
    const double q = 2.0 * simpson([&](double d) { return density(d) * (-mean_hot) * occupation_shift(d); }, 0.0,
                                   p.bandwidth);
    return {w, q};
}

}  // namespace

TEST_CASE("gap laws are normalized with unit mean")
{
    CHECK(simpson(poisson_density, 0.0, 60.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(simpson(goe_surmise_density, 0.0, 12.0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(simpson([](double s) { return s * goe_surmise_density(s); }, 0.0, 12.0) == doctest::Approx(1.0).epsilon(1e-9));
    for (double s : {0.1, 0.8, 2.0}) {
        CHECK(goe_surmise_cdf(s) == doctest::Approx(simpson(goe_surmise_density, 0.0, s)).epsilon(1e-9));
        CHECK(poisson_cdf(s) == doctest::Approx(simpson(poisson_density, 0.0, s)).epsilon(1e-9));
    }
    for (double u : {1e-6, 0.2, 0.5, 0.99}) CHECK(goe_surmise_cdf(goe_surmise_quantile(u)) == doctest::Approx(u));
}

TEST_CASE("KS distance of exact quantile samples is at the grid resolution")
{
    const int n = 5000;
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(goe_surmise_quantile((i + 0.5) / n));
    CHECK(ks_distance(g, GapLaw::goe) < 2.0 / n + 1e-3);
    CHECK(ks_distance(g, GapLaw::poisson) > 0.1);
}

TEST_CASE("Poisson and GOE samplers reproduce their laws")
{
    SpectrumEnsemble e;
    e.kind = GapKind::poisson;
    e.mean_gap = 2.5;
    const auto p = sample_gaps(e, 40000);
    double m = 0.0;
    for (double x : p) m += x;
    CHECK(m / p.size() == doctest::Approx(2.5).epsilon(0.02));
    CHECK(ks_distance(p, GapLaw::poisson) < 0.02);

    e.kind = GapKind::goe;
    e.dim = 200;
    e.mean_gap = 1.0;
    const auto g = sample_gaps(e, 20000);
    CHECK(ks_distance(g, GapLaw::goe) < 0.02);
    CHECK(ks_distance(g, GapLaw::goe) < ks_distance(g, GapLaw::poisson));

    e.dim = 20;
    CHECK_THROWS_AS(e.validate(), std::invalid_argument);
}

TEST_CASE("samplers are deterministic and exec-independent")
{
    SpectrumEnsemble e;
    e.kind = GapKind::meso;
    e.dim = 100;
    e.vartheta = 0.4;
    e.seed = 77;
    CHECK(sample_gaps(e, 3000, Exec::serial) == sample_gaps(e, 3000, Exec::parallel));
    const MblCycleParams p;
    const MblCycleEstimate a = mbl_cycle_monte_carlo(p, 100000, 5, Exec::serial);
    const MblCycleEstimate b = mbl_cycle_monte_carlo(p, 100000, 5, Exec::parallel);
    CHECK(a.work == b.work);
    CHECK(a.efficiency == b.efficiency);
}

TEST_CASE("pair cycle bookkeeping")
{
    MblCycleParams p;
    const PairCycle in = pair_cycle(p, 1.2, 0.01);
    CHECK(in.work + in.heat_hot + in.heat_cold == doctest::Approx(0.0));
    CHECK(in.work < 0.0);
    const PairCycle out = pair_cycle(p, 1.2, 0.5);
    CHECK(out.work == 0.0);
    CHECK(out.heat_hot == 0.0);
}

TEST_CASE("Monte Carlo cycle agrees with quadrature")
{
    for (double wb : {0.02, 0.1}) {
        MblCycleParams p;
        p.bandwidth = wb;
        const auto [w, q] = quadrature_cycle(p);
        const MblCycleEstimate est = mbl_cycle_monte_carlo(p, 1000000, 11);
        CHECK(std::abs(est.work - w) < 4.0 * est.work_stderr);
        CHECK(std::abs(est.heat_hot - q) < 4.0 * est.heat_hot_stderr);
        CHECK(std::abs(est.efficiency - (-w / q)) < 4.0 * est.efficiency_stderr + 1e-12);
    }
    // the closed form is the beta_c W_b >> 1 asymptote of the same integral
    MblCycleParams p;
    p.bandwidth = 1e-3;
    p.beta_c = 1e5;
    CHECK(quadrature_cycle(p).first == doctest::Approx(mbl_work_closed_form(p)).epsilon(0.01));
    p.beta_c = 100.0;
    p.bandwidth = 0.02;
    CHECK(std::abs(quadrature_cycle(p).first / mbl_work_closed_form(p) - 1.0) > 0.3);
}

TEST_CASE("CounterRng is a deterministic uniform stream")
{
    CounterRng a(3, 10), b(3, 10), c(3, 11);
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        CHECK(x == b());
        CHECK(x != c());
    }
    CounterRng u(9, 0);
    double s = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double v = u.uniform();
        CHECK((v > 0.0 && v < 1.0));
        s += v;
    }
    CHECK(s / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("GAAH Hamiltonian and inverse participation ratio")
{
    GaahSpec s;
    s.n_sites = 50;
    const Eigen::MatrixXd H = gaah_hamiltonian(s);
    CHECK((H - H.transpose()).norm() == 0.0);
    CHECK(H(0, 1) == doctest::Approx(-s.t));
    const double x = 2.0 * std::numbers::pi * s.nu * 7 + s.phi;
    CHECK(H(7, 7) == doctest::Approx(2.0 * s.theta * std::cos(x) / (1.0 - s.alpha * std::cos(x))));
    CHECK(H(0, 49) == 0.0);

    Eigen::VectorXd d = Eigen::VectorXd::Zero(50);
    d[3] = 1.0;
    CHECK(inverse_participation_ratio(d) == doctest::Approx(1.0));
    CHECK(inverse_participation_ratio(Eigen::VectorXd::Constant(50, 1.0 / std::sqrt(50.0))) == doctest::Approx(0.02));

    const GaahSpectrum sp = gaah_build(s);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    CHECK((sp.energies - es.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("GAAH mobility edge conventions")
{
    GaahSpec s;
    s.theta = 0.6;
    s.alpha = 0.5;
    CHECK(gaah_mobility_edge_printed(s) == doctest::Approx(0.8));
    CHECK(gaah_mobility_edge(s) == doctest::Approx(1.6));
    CHECK(localized_side(s, 2.0, 1.6));
    CHECK_FALSE(localized_side(s, 0.0, 1.6));
    s.alpha = 0.0;
    CHECK(std::isinf(gaah_mobility_edge_printed(s)));
    s.theta = 1.5;
    CHECK(localized_side(s, 0.0, 0.0));
    s.alpha = 1.0;
    CHECK_THROWS(s.validate());
}

TEST_CASE("Aubry-Andre limit localizes all or nothing")
{
    GaahSpec s;
    s.n_sites = 400;
    s.alpha = 0.0;
    s.theta = 0.5;
    CHECK(classify_edge(s, 2).fraction_localized < 0.02);
    s.theta = 1.5;
    CHECK(classify_edge(s, 2).fraction_localized > 0.98);
    s.theta = 0.6;
    s.alpha = 0.5;
    const EdgeClassification a = classify_edge(s, 2, Exec::serial), b = classify_edge(s, 2, Exec::parallel);
    CHECK(a.fraction_localized == b.fraction_localized);
    CHECK(a.misclassified_printed < 0.05);
}
