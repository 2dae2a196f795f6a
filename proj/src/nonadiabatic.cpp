#include "qtm/nonadiabatic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "qtm/fit.hpp"

namespace qtm {

namespace ode = boost::numeric::odeint;

double FrequencyRamp::at(double t) const
{
    if (duration <= 0.0) return to;
    const double s = std::clamp(t / duration, 0.0, 1.0);
    const double g = shape == RampShape::linear ? s : s * s * (3.0 - 2.0 * s);
    return from + (to - from) * g;
}

double sudden_q_star(double w0, double w1)
{
    if (w0 <= 0.0 || w1 <= 0.0) throw std::invalid_argument("sudden_q_star: frequencies must be positive");
    return (w0 * w0 + w1 * w1) / (2.0 * w0 * w1);
}

double q_star(const std::function<double(double)>& omega, double duration, double tol)
{
    const double w0 = omega(0.0);
    if (duration <= 0.0) return sudden_q_star(w0, omega(0.0 + duration));
    if (w0 <= 0.0) throw std::invalid_argument("q_star: frequency must stay positive");
    // scaling factor b(t) of the Gaussian width; b'' + w^2 b = w0^2 / b^3
    using State = std::array<double, 2>;
    State x{1.0, 0.0};
    auto rhs = [&](const State& s, State& d, double t) {
        const double w = omega(t);
        if (!(w > 0.0)) throw std::domain_error("q_star: frequency left the positive axis at t=" + std::to_string(t));
        d[0] = s[1];
        d[1] = -w * w * s[0] + w0 * w0 / (s[0] * s[0] * s[0]);
    };
    const double w_scale = std::max(w0, omega(duration));
    ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<State>>(tol, tol), rhs, x, 0.0, duration,
                            std::min(duration, 0.01 / w_scale));
    const double b = x[0], db = x[1], w1 = omega(duration);
    if (!std::isfinite(b) || b <= 0.0) throw std::domain_error("q_star: auxiliary equation diverged");
    return w0 / (2.0 * w1) * (db * db / (w0 * w0) + 1.0 / (b * b) + w1 * w1 * b * b / (w0 * w0));
}

double q_star(const FrequencyRamp& ramp, double tol)
{
    if (ramp.duration <= 0.0) return sudden_q_star(ramp.from, ramp.to);
    return q_star([&](double t) { return ramp.at(t); }, ramp.duration, tol);
}

double trap_energy(int n, Statistics stats, double omega, double T)
{
    if (n < 1) throw std::invalid_argument("trap_energy: need at least one particle");
    if (omega <= 0.0 || T < 0.0) throw std::invalid_argument("trap_energy: omega > 0 and T >= 0 required");
    // Z_N = e^{-beta E0} prod_k (1 - e^{-k beta omega})^{-1} for both statistics in a 1D trap
    const double e0 = stats == Statistics::boson ? 0.5 * n * omega : 0.5 * double(n) * n * omega;
    if (T == 0.0) return e0;
    double e = e0;
    for (int k = 1; k <= n; ++k) {
        const double x = k * omega / T;
        if (x < 700.0) e += k * omega / std::expm1(x);
    }
    return e;
}

void TrapCycleSpec::validate() const
{
    if (n_particles < 1) throw std::invalid_argument("TrapCycleSpec: n_particles must be >= 1");
    if (!(vartheta_c > 0.0 && vartheta_c < vartheta_h))
        throw std::invalid_argument("TrapCycleSpec: need 0 < vartheta_c < vartheta_h");
    if (!(T_c >= 0.0 && T_c < T_h)) throw std::invalid_argument("TrapCycleSpec: need 0 <= T_c < T_h");
    if (tau_ramp < 0.0 || tau_bath < 0.0) throw std::invalid_argument("TrapCycleSpec: stroke times must be >= 0");
}

NonadiabaticityFactors stroke_factors(const TrapCycleSpec& s)
{
    s.validate();
    return {q_star(FrequencyRamp{s.vartheta_c, s.vartheta_h, s.tau_ramp, s.shape}),
            q_star(FrequencyRamp{s.vartheta_h, s.vartheta_c, s.tau_ramp, s.shape})};
}

namespace {

struct Corners {
    double ea, eb, ec, ed;
};

Corners corners(const TrapCycleSpec& s, const NonadiabaticityFactors& f)
{
    const double ea = trap_energy(s.n_particles, s.stats, s.vartheta_c, s.T_c);
    const double ec = trap_energy(s.n_particles, s.stats, s.vartheta_h, s.T_h);
    return {ea, f.q_ab * s.vartheta_h / s.vartheta_c * ea, ec, f.q_cd * s.vartheta_c / s.vartheta_h * ec};
}

}  // namespace

double nonadiabatic_work(const TrapCycleSpec& s, const NonadiabaticityFactors& f)
{
    const double r = s.vartheta_h / s.vartheta_c;
    const double ea = trap_energy(s.n_particles, s.stats, s.vartheta_c, s.T_c);
    const double ec = trap_energy(s.n_particles, s.stats, s.vartheta_h, s.T_h);
    return (f.q_ab * r - 1.0) * ea + (f.q_cd / r - 1.0) * ec;
}

double nonadiabatic_efficiency(const TrapCycleSpec& s, const NonadiabaticityFactors& f)
{
    const double r = s.vartheta_h / s.vartheta_c;
    const double ea = trap_energy(s.n_particles, s.stats, s.vartheta_c, s.T_c);
    const double ec = trap_energy(s.n_particles, s.stats, s.vartheta_h, s.T_h);
    return 1.0 - (f.q_cd * ec - r * ea) / (r * (ec - f.q_ab * r * ea));
}

CycleOutcome nonadiabatic_cycle(const TrapCycleSpec& s, const NonadiabaticityFactors& f)
{
    s.validate();
    const Corners c = corners(s, f);
    const double work = (c.eb - c.ea) + (c.ed - c.ec);
    CycleOutcome out = make_outcome(work, c.ec - c.eb, c.ea - c.ed, s.cycle_time());
    return out;
}

CycleOutcome nonadiabatic_cycle(const TrapCycleSpec& s) { return nonadiabatic_cycle(s, stroke_factors(s)); }

PowerOptimum optimize_power(const TrapCycleSpec& spec, double lo, double hi, double tol)
{
    if (!(0.0 < lo && lo < hi && hi < 1.0)) throw std::invalid_argument("optimize_power: need 0 < lo < hi < 1");
    auto at = [&](double ratio) {
        TrapCycleSpec s = spec;
        s.vartheta_h = spec.vartheta_c / ratio;
        return s;
    };
    auto power = [&](double ratio) { return -nonadiabatic_cycle(at(ratio)).work / spec.cycle_time(); };
    const int n_grid = 25;
    int best = 0;
    double pbest = -1e300;
    std::vector<double> grid(n_grid);
    for (int i = 0; i < n_grid; ++i) {
        grid[i] = lo + (hi - lo) * i / (n_grid - 1);
        const double p = power(grid[i]);
        if (p > pbest) {
            pbest = p;
            best = i;
        }
    }
    const double a = grid[std::max(best - 1, 0)], b = grid[std::min(best + 1, n_grid - 1)];
    double x = golden_max(power, a, b, tol);
    if (power(grid[best]) > power(x)) x = grid[best];
    const TrapCycleSpec s = at(x);
    PowerOptimum out;
    out.ratio = x;
    out.factors = stroke_factors(s);
    const CycleOutcome c = nonadiabatic_cycle(s, out.factors);
    out.power = -c.work / s.cycle_time();
    out.efficiency = c.efficiency;
    const double edge = 2.0 * tol * (hi - lo) + 1e-9;
    out.interior = x - lo > edge && hi - x > edge;
    return out;
}

AdvantageRatios advantage_ratios(const TrapCycleSpec& spec)
{
    AdvantageRatios out;
    TrapCycleSpec one = spec;
    one.n_particles = 1;
    out.single = optimize_power(one);
    out.many = spec.n_particles == 1 ? out.single : optimize_power(spec);
    if (out.single.power <= 0.0 || out.many.power <= 0.0)
        throw std::runtime_error("advantage_ratios: no engine regime inside the ratio window");
    out.r = out.many.power / (spec.n_particles * out.single.power);
    out.rho = out.many.efficiency / out.single.efficiency;
    return out;
}

}  // namespace qtm
