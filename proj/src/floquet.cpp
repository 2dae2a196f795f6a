#include "qtm/floquet.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace qtm {

void ModulationSpec::validate() const
{
    if (!(omega0 > 0.0)) throw std::invalid_argument("omega0 must be positive");
    if (waveform == WaveformKind::constant) return;
    if (!(Omega > 0.0)) throw std::invalid_argument("Omega must be positive");
    if (q_cutoff < 1) throw std::invalid_argument("q_cutoff must be >= 1");
    if (waveform == WaveformKind::tabulated) {
        if (table.size() < 2) throw std::invalid_argument("waveform table needs at least two samples");
        double mean = 0.0;
        for (double w : table) mean += w;
        mean /= static_cast<double>(table.size());
        if (std::abs(mean - omega0) > 1e-9 * std::max(1.0, omega0))
            throw std::invalid_argument("omega0 must equal the cycle average of the table");
    }
}

double ModulationSpec::omega_at(double t) const
{
    switch (waveform) {
    case WaveformKind::constant:
        return omega0;
    case WaveformKind::sinusoidal:
        return omega0 + lambda * Omega * std::cos(Omega * t);
    case WaveformKind::tabulated: {
        const double period = 2.0 * std::numbers::pi / Omega;
        double u = std::fmod(t, period);
        if (u < 0) u += period;
        const double pos = u / period * static_cast<double>(table.size());
        const auto i = static_cast<std::size_t>(pos) % table.size();
        const double f = pos - std::floor(pos);
        return (1.0 - f) * table[i] + f * table[(i + 1) % table.size()];
    }
    }
    return omega0;
}

namespace {

// accumulated phase int_0^t (omega - omega0) on an even grid of one period
std::vector<double> phase_grid(const ModulationSpec& mod, int M)
{
    std::vector<double> phi(M);
    const double period = 2.0 * std::numbers::pi / mod.Omega;
    const double dt = period / M;
    if (mod.waveform == WaveformKind::sinusoidal) {
        for (int k = 0; k < M; ++k) phi[k] = mod.lambda * std::sin(mod.Omega * k * dt);
        return phi;
    }
    // piecewise-linear omega integrated exactly on a grid fine enough to contain the table nodes
    const int sub = 16;
    double acc = 0.0;
    phi[0] = 0.0;
    for (int k = 1; k < M; ++k) {
        const double h = dt / sub;
        for (int s = 0; s < sub; ++s) {
            const double t0 = (k - 1) * dt + s * h;
            acc += 0.5 * h * (mod.omega_at(t0) + mod.omega_at(t0 + h) - 2.0 * mod.omega0);
        }
        phi[k] = acc;
    }
    return phi;
}

}  // namespace

HarmonicWeights harmonic_weights(const ModulationSpec& mod)
{
    mod.validate();
    HarmonicWeights out;
    if (mod.waveform == WaveformKind::constant) {
        out.P[0] = 1.0;
        out.cutoff = 0;
        return out;
    }
    for (int cut = mod.q_cutoff; cut <= mod.max_cutoff; cut *= 2) {
        int M = 64;
        while (M < 16 * (cut + 1)) M *= 2;
        if (mod.waveform == WaveformKind::tabulated)
            while (M < 8 * static_cast<int>(mod.table.size())) M *= 2;
        const std::vector<double> phi = phase_grid(mod, M);
        out.P.clear();
        double total = 0.0;
        for (int q = -cut; q <= cut; ++q) {
            std::complex<double> c = 0.0;
            for (int k = 0; k < M; ++k)
                c += std::polar(1.0, -phi[k] + 2.0 * std::numbers::pi * q * k / M);
            c /= static_cast<double>(M);
            out.P[q] = std::norm(c);
            total += out.P[q];
        }
        out.deficit = 1.0 - total;
        out.cutoff = cut;
        if (out.deficit < mod.deficit_tol) return out;
    }
    throw std::runtime_error("harmonic truncation: weight deficit above tolerance at max_cutoff");
}

double TwoBathSpec::separation_violation(double omega0) const
{
    double worst = 0.0;
    const int n = 2000;
    for (int i = 0; i <= n; ++i) {
        const double above = omega0 * (1.0 + 9.0 * i / n);
        const double below = omega0 * (1e-6 + (1.0 - 1e-6) * i / n);
        worst = std::max(worst, std::abs(cold.emission(above)));
        worst = std::max(worst, std::abs(hot.emission(below)));
    }
    return worst;
}

void TwoBathSpec::validate(double omega0) const
{
    if (!hot.emission || !cold.emission) throw std::invalid_argument("bath spectral function missing");
    if (separation_violation(omega0) > 1e-10) throw std::invalid_argument("bath spectra are not separated at omega0");
}

TwoBathSpec separated_flat_baths(double beta_h, double beta_c, double omega0, double gamma_h, double gamma_c,
                                 double nu_max)
{
    TwoBathSpec b;
    b.hot.beta = beta_h;
    b.hot.label = "hot";
    b.hot.emission = [=](double nu) { return (nu > omega0 && nu < nu_max) ? gamma_h : 0.0; };
    b.cold.beta = beta_c;
    b.cold.label = "cold";
    b.cold.emission = [=](double nu) { return (nu > 0.0 && nu < omega0) ? gamma_c : 0.0; };
    return b;
}

namespace {

// harmonics with omega_q <= 0 carry no bath coupling
template <class F>
void for_each_channel(const HarmonicWeights& w, const ModulationSpec& mod, const TwoBathSpec& baths, F&& f)
{
    for (const auto& [q, P] : w.P) {
        if (P <= 0.0) continue;
        const double wq = mod.omega0 + q * mod.Omega;
        if (wq <= 0.0) continue;
        f(baths.hot, wq, P, true);
        f(baths.cold, wq, P, false);
    }
}

}  // namespace

ChannelRates floquet_rates(const HarmonicWeights& w, const ModulationSpec& mod, const TwoBathSpec& baths)
{
    ChannelRates r;
    for_each_channel(w, mod, baths, [&](const BathSpec& b, double wq, double P, bool) {
        const double g = b.emission(wq);
        r.down += P * g;
        r.up += P * g * std::exp(-b.beta * wq);
    });
    if (!(r.down > 0.0)) throw std::domain_error("empty harmonic support: all rates vanish");
    return r;
}

Eigen::MatrixXd floquet_generator(double j, const HarmonicWeights& w, const ModulationSpec& mod,
                                  const TwoBathSpec& baths)
{
    const ChannelRates r = floquet_rates(w, mod, baths);
    return birth_death_generator(j, r.down, r.up);
}

double effective_temperature(const HarmonicWeights& w, const ModulationSpec& mod, const TwoBathSpec& baths)
{
    const ChannelRates r = floquet_rates(w, mod, baths);
    return -std::log(r.up / r.down) / mod.omega0;
}

double tune_beta_scale(const HarmonicWeights& w, const ModulationSpec& mod, const TwoBathSpec& baths,
                       double target_beta_eff)
{
    auto beff = [&](double k) {
        TwoBathSpec b = baths;
        b.hot.beta *= k;
        b.cold.beta *= k;
        return effective_temperature(w, mod, b);
    };
    double lo = -20.0, hi = 20.0;
    if ((beff(std::exp(lo)) - target_beta_eff) * (beff(std::exp(hi)) - target_beta_eff) > 0.0)
        throw std::domain_error("target beta_eff not reachable by scaling the bath temperatures");
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (beff(std::exp(mid)) < target_beta_eff) lo = mid;
        else hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

double lowering_correlator(double j, double x)
{
    const BlockPopulations g = block_gibbs(j, x, 1.0);
    double s = 0.0;
    for (int a = 0; a < g.p.size(); ++a) s += g.p[a] * lowering_weight(j, j - a);
    return s;
}

FloquetPower steady_power_block(double j, const HarmonicWeights& w, const ModulationSpec& mod,
                                const TwoBathSpec& baths)
{
    FloquetPower out;
    out.beta_eff = effective_temperature(w, mod, baths);
    const BlockPopulations g = block_gibbs(j, out.beta_eff, mod.omega0);
    double lower = 0.0, raise = 0.0;
    for (int a = 0; a < g.p.size(); ++a) {
        lower += g.p[a] * lowering_weight(j, j - a);
        raise += g.p[a] * raising_weight(j, j - a);
    }
    for_each_channel(w, mod, baths, [&](const BathSpec& b, double wq, double P, bool hot) {
        const double g_em = b.emission(wq);
        const double flow = wq * P * g_em * (std::exp(-b.beta * wq) * raise - lower);
        (hot ? out.heat_hot : out.heat_cold) += flow;
    });
    out.power = -(out.heat_hot + out.heat_cold);
    out.engine = out.power < 0.0 && out.heat_hot > 0.0;
    return out;
}

FloquetPower steady_power(const SpinEnsembleSpec& ens, const HarmonicWeights& w, const ModulationSpec& mod,
                          const TwoBathSpec& baths, FloquetCoupling coupling)
{
    ens.validate();
    if (coupling == FloquetCoupling::collective) return steady_power_block(ens.max_j(), w, mod, baths);
    FloquetPower one = steady_power_block(ens.spin_s, w, mod, baths);
    one.heat_hot *= ens.n_spins;
    one.heat_cold *= ens.n_spins;
    one.power *= ens.n_spins;
    return one;
}

double power_ratio(int n_spins, double s, double x)
{
    return lowering_correlator(n_spins * s, x) / (n_spins * lowering_correlator(s, x));
}

}  // namespace qtm
