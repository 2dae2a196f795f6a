#include "qtm/critical_otto.hpp"

#include <cmath>
#include <stdexcept>

namespace qtm {

void CriticalCycleSpec::validate() const
{
    chain.validate();
    if (!(tau1 > 0.0) || tau2 < 0.0) throw std::invalid_argument("stroke durations must be positive");
    if (q_energizing < 0.0 || q_energizing > 1.0 || q_relaxing < 0.0 || q_relaxing > 1.0)
        throw std::invalid_argument("bath targets must lie in [0, 1]");
    const double J = std::abs(chain.J);
    const bool crosses = (h_a - J) * (h_b - J) <= 0.0 || (h_a + J) * (h_b + J) <= 0.0;
    if (!crosses) throw std::invalid_argument("stroke 1 neither crosses nor ends at a critical point");
}

bool CriticalCycleSpec::ends_at_critical_point() const
{
    return std::abs(std::abs(h_b) - std::abs(chain.J)) < 1e-12;
}

namespace {

// pair energy with excited population p in the {ground, doubly excited} sector
double pair_energy(double k, double h, double J, double p)
{
    const double a = h + J * std::cos(k), e = mode_energy(k, h, J);
    return -2.0 * a - e + 2.0 * e * p;
}

CycleOutcome assemble(const CriticalCycleSpec& s, const std::vector<double>& P1, const std::vector<double>& P3)
{
    const std::vector<double> ks = s.chain.momenta();
    const double J = s.chain.J, qE = s.q_energizing, qR = s.q_relaxing;
    double w = 0.0, q_in = 0.0, q_out = 0.0;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const double k = ks[i];
        const double pB = qR + (1.0 - 2.0 * qR) * P1[i];
        const double pD = qE + (1.0 - 2.0 * qE) * P3[i];
        const double EA = pair_energy(k, s.h_a, J, qR), EB = pair_energy(k, s.h_b, J, pB);
        const double EC = pair_energy(k, s.h_b, J, qE), ED = pair_energy(k, s.h_a, J, pD);
        w += (EB - EA) + (ED - EC);
        q_in += EC - EB;
        q_out += EA - ED;
    }
    return make_outcome(w, q_in, q_out, s.tau1 + s.tau2);
}

}  // namespace

namespace {

std::vector<double> stroke3_probabilities(const CriticalCycleSpec& spec, Exec exec)
{
    const std::vector<double> ks = spec.chain.momenta();
    std::vector<double> P3(ks.size(), 0.0);
    if (spec.q_energizing == 0.5) return P3;
    if (spec.tau2 > 0.0)
        return ramp_transition_probabilities(spec.chain, {spec.h_b, spec.h_a, spec.tau2}, spec.max_phase,
                                             spec.max_dt, exec);
    // sudden stroke: overlap of the h_b ground state with the h_a excited state
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const Eigen::Matrix2d Vb = pair_eigenvectors(ks[i], spec.h_b, spec.chain.J);
        const Eigen::Matrix2d Va = pair_eigenvectors(ks[i], spec.h_a, spec.chain.J);
        const double o = Va.col(1).dot(Vb.col(0));
        P3[i] = o * o;
    }
    return P3;
}

}  // namespace

CycleOutcome run_critical_cycle(const CriticalCycleSpec& spec, Exec exec)
{
    spec.validate();
    const auto P1 = ramp_transition_probabilities(spec.chain, {spec.h_a, spec.h_b, spec.tau1}, spec.max_phase,
                                                  spec.max_dt, exec);
    return assemble(spec, P1, stroke3_probabilities(spec, exec));
}

CycleOutcome adiabatic_cycle(const CriticalCycleSpec& spec)
{
    spec.validate();
    const std::size_t n = spec.chain.momenta().size();
    CycleOutcome out = assemble(spec, std::vector<double>(n, 0.0), stroke3_probabilities(spec, Exec::serial));
    out.cycle_time = std::numeric_limits<double>::infinity();
    out.power = 0.0;
    return out;
}

std::vector<double> log_grid(double lo, double hi, int n)
{
    if (!(lo > 0.0 && hi > lo) || n < 2) throw std::invalid_argument("log_grid needs 0 < lo < hi and n >= 2");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
    return g;
}

Tau1Sweep sweep_tau1(const CriticalCycleSpec& spec, const std::vector<double>& tau1, Exec exec)
{
    Tau1Sweep out;
    out.tau1 = tau1;
    out.cycles.resize(tau1.size());
    const long n = static_cast<long>(tau1.size());
    auto point = [&](long i) {
        CriticalCycleSpec s = spec;
        s.tau1 = tau1[i];
        out.cycles[i] = run_critical_cycle(s, Exec::serial);
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < n; ++i) point(i);
    } else {
        for (long i = 0; i < n; ++i) point(i);
    }
    return out;
}

ScalingFit work_scaling(const Tau1Sweep& sweep, double w_inf, FitOptions opts)
{
    std::vector<double> dw;
    for (const auto& c : sweep.cycles) dw.push_back(c.work - w_inf);
    return fit_power_law(sweep.tau1, dw, opts);
}

double work_prefactor(const Tau1Sweep& sweep, double w_inf, double exponent)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < sweep.tau1.size(); ++i) {
        const double dw = sweep.cycles[i].work - w_inf;
        if (!(dw > 0.0)) throw std::domain_error("work_prefactor: W - W_inf must be positive");
        acc += std::log(dw) - exponent * std::log(sweep.tau1[i]);
    }
    return std::exp(acc / static_cast<double>(sweep.tau1.size()));
}

double optimal_tau_closed_form(double R, double w_inf, int x)
{
    if (x != 1 && x != 2) throw std::invalid_argument("x must be 1 or 2");
    // nu = z = d = 1
    const double base = R * (2.0 + x) / (std::abs(w_inf) * 2.0);
    return std::pow(base, 2.0 / x);
}

double efficiency_at_max_power(double w_inf, double q_in_inf, double excess)
{
    return -(w_inf + excess) / (q_in_inf - excess);
}

OptimalQuench optimal_quench(const CriticalCycleSpec& spec, double R, double w_inf, double q_in_inf, int x,
                             double search_lo, double search_hi, int n_grid)
{
    OptimalQuench out;
    out.tau_closed = optimal_tau_closed_form(R, w_inf, x);
    const double work_exp = x == 1 ? -0.5 : -1.0;
    out.eta_hat = efficiency_at_max_power(w_inf, q_in_inf, R * std::pow(out.tau_closed, work_exp));

    auto output_power = [&](double log_tau) {
        CriticalCycleSpec s = spec;
        s.tau1 = std::exp(log_tau);
        return -run_critical_cycle(s).power;
    };
    const auto grid = log_grid(search_lo, search_hi, n_grid);
    std::size_t best = 0;
    double pbest = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double p = output_power(std::log(grid[i]));
        if (p > pbest) {
            pbest = p;
            best = i;
        }
    }
    out.interior = best > 0 && best + 1 < grid.size();
    const double lo = std::log(grid[best > 0 ? best - 1 : 0]);
    const double hi = std::log(grid[std::min(best + 1, grid.size() - 1)]);
    const double lt = golden_max(output_power, lo, hi, 1e-4, 40);
    out.tau_search = std::exp(lt);
    out.power_search = output_power(lt);
    out.closed_form_applicable = spec.tau2 < 0.1 * out.tau_search;
    return out;
}

double max_efficiency(const TfimSpec& chain, double h_a, double h_b)
{
    double best = -std::numeric_limits<double>::infinity();
    for (double k : chain.momenta())
        best = std::max(best, 1.0 - mode_energy(k, h_a, chain.J) / mode_energy(k, h_b, chain.J));
    return best;
}

ScalingFit max_efficiency_scaling(const std::vector<int>& sizes, double h_a, double h_b, FitOptions opts)
{
    std::vector<double> n, gap;
    for (int N : sizes) {
        n.push_back(N);
        gap.push_back(1.0 - max_efficiency({N, 1.0}, h_a, h_b));
    }
    return fit_power_law(n, gap, opts);
}

}  // namespace qtm
