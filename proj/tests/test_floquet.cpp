#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qtm/floquet.hpp"

using namespace qtm;

namespace {

// direct quadrature of |<exp(-i phi(t) + i q Omega t)>|^2 over one period, phi from the waveform
double harmonic_by_quadrature(const ModulationSpec& mod, int q, int M = 20000)
{
    const double period = 2.0 * std::numbers::pi / mod.Omega, dt = period / M;
    std::complex<double> c = 0.0;
    double phi = 0.0;
    for (int k = 0; k < M; ++k) {
        const double t = k * dt;
        c += std::polar(1.0, -phi + q * mod.Omega * t);
        // midpoint-Simpson step of the phase
        const double a = mod.omega_at(t), m = mod.omega_at(t + 0.5 * dt), b = mod.omega_at(t + dt);
        phi += dt / 6.0 * (a + 4.0 * m + b) - dt * mod.omega0;
    }
    return std::norm(c / double(M));
}

ModulationSpec sinusoid(double lambda)
{
    ModulationSpec m;
    m.omega0 = 1.0;
    m.Omega = 0.2;
    m.lambda = lambda;
    return m;
}

}  // namespace

TEST_CASE("sinusoidal harmonics are squared Bessel functions")
{
    for (double lambda : {0.1, 0.5, 1.0, 2.5}) {
        const HarmonicWeights w = harmonic_weights(sinusoid(lambda));
        CHECK(w.deficit < 1e-6);
        for (const auto& [q, P] : w.P) {
            const double jq = std::cyl_bessel_j(double(std::abs(q)), lambda);
            CHECK(P == doctest::Approx(jq * jq).epsilon(1e-10));
        }
    }
}

TEST_CASE("tabulated waveform harmonics agree with direct quadrature")
{
    ModulationSpec m;
    m.omega0 = 1.0;
    m.Omega = 0.3;
    m.waveform = WaveformKind::tabulated;
    // square-ish wave with zero-mean modulation
    const int n = 64;
    for (int i = 0; i < n; ++i) m.table.push_back(1.0 + (i < n / 2 ? 0.1 : -0.1));
    const HarmonicWeights w = harmonic_weights(m);
    for (int q = -3; q <= 3; ++q) CHECK(w.P.at(q) == doctest::Approx(harmonic_by_quadrature(m, q)).epsilon(1e-5));
    m.table[0] = 5.0;
    CHECK_THROWS(m.validate());
}

TEST_CASE("constant driving keeps only the carrier")
{
    ModulationSpec m;
    m.waveform = WaveformKind::constant;
    const HarmonicWeights w = harmonic_weights(m);
    CHECK(w.P.size() == 1);
    CHECK(w.P.at(0) == 1.0);
}

TEST_CASE("separated baths and beta_eff tuning")
{
    const ModulationSpec mod = sinusoid(0.5);
    const HarmonicWeights w = harmonic_weights(mod);
    TwoBathSpec b = separated_flat_baths(0.5, 2.0, mod.omega0, 1.0, 1.0);
    CHECK(b.separation_violation(mod.omega0) == 0.0);
    CHECK_NOTHROW(b.validate(mod.omega0));
    for (double target : {1e-3, 1e-2, 0.5}) {
        const double k = tune_beta_scale(w, mod, b, target);
        TwoBathSpec s = b;
        s.hot.beta *= k;
        s.cold.beta *= k;
        CHECK(effective_temperature(w, mod, s) == doctest::Approx(target).epsilon(1e-9));
    }
    TwoBathSpec bad = b;
    bad.cold.emission = [](double) { return 1.0; };
    CHECK_THROWS(bad.validate(1.0));
}

TEST_CASE("steady state is stationary and its currents balance")
{
    const ModulationSpec mod = sinusoid(0.8);
    const HarmonicWeights w = harmonic_weights(mod);
    const TwoBathSpec b = separated_flat_baths(0.3, 3.0, mod.omega0, 1.0, 1.0);
    for (double j : {0.5, 3.0, 10.0}) {
        const FloquetPower p = steady_power_block(j, w, mod, b);
        const BlockPopulations g = block_gibbs(j, p.beta_eff, mod.omega0);
        CHECK((floquet_generator(j, w, mod, b) * g.p).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(p.power == doctest::Approx(-(p.heat_hot + p.heat_cold)));
    }
}

TEST_CASE("lowering correlator and low-temperature power ratio")
{
    for (double j : {0.5, 2.0, 6.5})
        for (double x : {0.01, 1.0}) {
            double z = 0.0, s = 0.0;
            for (double m = j; m >= -j - 1e-9; m -= 1.0) {
                const double wgt = std::exp(-x * m);
                z += wgt;
                s += wgt * (j + m) * (j - m + 1.0);
            }
            CHECK(lowering_correlator(j, x) == doctest::Approx(s / z).epsilon(1e-12));
        }
    for (int n : {1, 4, 30}) CHECK(power_ratio(n, 0.5, 1e-6) == doctest::Approx((n + 2.0) / 3.0).epsilon(1e-5));
    // saturation at large N
    CHECK(power_ratio(2000, 0.5, 1.0) == doctest::Approx(1.0 / std::tanh(0.5)).epsilon(2e-3));

    const ModulationSpec mod = sinusoid(0.5);
    const HarmonicWeights w = harmonic_weights(mod);
    const TwoBathSpec b = separated_flat_baths(0.3, 3.0, 1.0, 1.0, 1.0);
    const SpinEnsembleSpec one{1, 0.5, 1.0};
    CHECK(steady_power(one, w, mod, b, FloquetCoupling::collective).power
          == doctest::Approx(steady_power(one, w, mod, b, FloquetCoupling::independent).power));
}
