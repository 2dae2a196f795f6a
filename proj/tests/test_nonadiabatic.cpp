#include <doctest.h>

#include <functional>
#include <random>

#include "qtm/nonadiabatic.hpp"

using namespace qtm;
using cd = std::complex<double>;

namespace {

// truncated Fock basis of the reference frequency w0: x^2 and p^2 as dense matrices
struct Fock {
    Eigen::MatrixXcd x2, p2;
    explicit Fock(int dim, double w0)
    {
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
        for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(double(n));
        const Eigen::MatrixXcd ad = a.adjoint();
        const Eigen::MatrixXcd x = (a + ad) / std::sqrt(2.0 * w0);
        const Eigen::MatrixXcd p = cd(0, 1) * std::sqrt(w0 / 2.0) * (ad - a);
        x2 = x * x;
        p2 = p * p;
    }
    Eigen::MatrixXcd H(double w) const { return 0.5 * p2 + 0.5 * w * w * x2; }
};

// ground state of w_from driven through omega(t), then <H(w_to)> / (w_to / 2)
double fock_q_star(const std::function<double(double)>& omega, double duration, int dim = 60, int steps = 20000)
{
    const double w0 = omega(0.0), w1 = omega(duration);
    const Fock f(dim, w0);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    psi[0] = 1.0;
    const double dt = duration / steps;
    auto rhs = [&](double t, const Eigen::VectorXcd& v) -> Eigen::VectorXcd { return cd(0, -1) * (f.H(omega(t)) * v); };
    for (int k = 0; k < steps; ++k) {
        const double t = k * dt;
        const Eigen::VectorXcd k1 = rhs(t, psi), k2 = rhs(t + dt / 2, psi + dt / 2 * k1),
                               k3 = rhs(t + dt / 2, psi + dt / 2 * k2), k4 = rhs(t + dt, psi + dt * k3);
        psi += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return (psi.adjoint() * f.H(w1) * psi)(0).real() / (0.5 * w1);
}

// canonical energy by explicit enumeration of occupations over `levels` single-particle states
double brute_energy(int n, Statistics st, double w, double T, int levels = 120)
{
    double z = 0.0, e = 0.0;
    std::function<void(int, int, double)> rec = [&](int start, int left, double energy) {
        if (left == 0) {
            const double b = std::exp(-energy / T);
            z += b;
            e += energy * b;
            return;
        }
        for (int l = start; l < levels; ++l) rec(st == Statistics::fermion ? l + 1 : l, left - 1, energy + w * (l + 0.5));
    };
    rec(0, n, 0.0);
    return e / z;
}

}  // namespace

TEST_CASE("sudden switch matches the Fock-basis oracle")
{
    for (auto [a, b] : {std::pair{1.0, 2.0}, std::pair{2.0, 1.0}, std::pair{1.0, 3.5}}) {
        const Fock f(40, a);
        const double e = 0.5 * f.p2(0, 0).real() + 0.5 * b * b * f.x2(0, 0).real();
        CHECK(sudden_q_star(a, b) == doctest::Approx(e / (0.5 * b)).epsilon(1e-12));
        CHECK(q_star(FrequencyRamp{a, b, 0.0}) == doctest::Approx(sudden_q_star(a, b)));
    }
}

TEST_CASE("finite ramps match Fock-basis propagation")
{
    for (RampShape shape : {RampShape::linear, RampShape::smooth})
        for (double tau : {0.3, 1.0, 3.0}) {
            const FrequencyRamp r{1.0, 2.0, tau, shape};
            CHECK(q_star(r) == doctest::Approx(fock_q_star([&](double t) { return r.at(t); }, tau)).epsilon(1e-7));
        }
    // expansion stroke
    const FrequencyRamp down{2.0, 1.0, 0.8};
    CHECK(q_star(down) == doctest::Approx(fock_q_star([&](double t) { return down.at(t); }, 0.8)).epsilon(1e-7));
}

TEST_CASE("property: Q* >= 1 for random positive smooth ramps")
{
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = 0.3 + 2.0 * u(rng), b = 0.3 + 2.0 * u(rng), tau = 0.05 + 5.0 * u(rng);
        double c[3];
        for (double& x : c) x = 0.3 * std::min(a, b) * (2.0 * u(rng) - 1.0) / 3.0;
        auto omega = [=](double t) {
            const double s = t / tau;
            double w = a + (b - a) * s;
            for (int k = 0; k < 3; ++k) w += c[k] * std::sin((k + 1) * M_PI * s);
            return w;
        };
        CHECK(q_star(omega, tau, 1e-10) >= 1.0 - 1e-8);
    }
}

TEST_CASE("slow ramps are adiabatic")
{
    CHECK(q_star(FrequencyRamp{1.0, 2.0, 1000.0}) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK_THROWS_AS(q_star([](double t) { return 1.0 - 2.0 * t; }, 1.0), std::domain_error);
}

TEST_CASE("canonical trap energies against explicit enumeration")
{
    for (Statistics st : {Statistics::boson, Statistics::fermion})
        for (int n : {1, 2, 3})
            for (double T : {0.3, 1.0, 4.0})
                CHECK(trap_energy(n, st, 1.3, T) == doctest::Approx(brute_energy(n, st, 1.3, T)).epsilon(1e-9));
    CHECK(trap_energy(4, Statistics::fermion, 1.0, 1e-3) == doctest::Approx(8.0));
    CHECK(trap_energy(4, Statistics::boson, 1.0, 1e-3) == doctest::Approx(2.0));
}

TEST_CASE("nonadiabatic cycle bookkeeping")
{
    TrapCycleSpec s;
    s.n_particles = 3;
    s.T_h = 20.0;
    const CycleOutcome unit = nonadiabatic_cycle(s, {});
    CHECK(unit.first_law_ok());
    CHECK(unit.efficiency == doctest::Approx(1.0 - s.vartheta_c / s.vartheta_h));
    const CycleOutcome lossy = nonadiabatic_cycle(s, {1.2, 1.1});
    CHECK(lossy.work > unit.work);
    CHECK(lossy.efficiency < unit.efficiency);
    CHECK(nonadiabatic_work(s, {1.2, 1.1}) == doctest::Approx(lossy.work));

    s.tau_ramp = 0.0;
    const NonadiabaticityFactors f = stroke_factors(s);
    CHECK(f.q_ab == doctest::Approx(sudden_q_star(1.0, 2.0)));
    CHECK(f.q_cd == doctest::Approx(sudden_q_star(2.0, 1.0)));
    s.T_h = 0.5;
    CHECK_THROWS(s.validate());
}

TEST_CASE("power optimum lies inside the ratio window")
{
    TrapCycleSpec s;
    s.T_h = 20.0;
    const PowerOptimum p = optimize_power(s);
    CHECK(p.interior);
    CHECK(p.power > 0.0);
    CHECK(p.efficiency < 1.0 - p.ratio);
}
