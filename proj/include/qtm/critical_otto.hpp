#pragma once

#include <vector>

#include "qtm/fit.hpp"
#include "qtm/free_fermion.hpp"
#include "qtm/thermo.hpp"

namespace qtm {

// A (field h_a, relaxed to q_relaxing) -> B (h_b) over tau1; reset to q_energizing at B;
// back to h_a over tau2; reset to q_relaxing. Resets act per pair on the excited population.
struct CriticalCycleSpec {
    TfimSpec chain{100, 1.0};
    double h_a = -5.0;
    double h_b = 70.0;
    double tau1 = 100.0;
    double tau2 = 0.01;
    double q_energizing = 0.5;
    double q_relaxing = 0.0;
    double max_phase = 0.2;  // Magnus step control, see ramp_transition_probabilities
    double max_dt = 0.05;

    void validate() const;
    bool ends_at_critical_point() const;
};

// heat_hot = Q_in from the energizing bath, heat_cold = Q_out; cycle time tau1 + tau2
CycleOutcome run_critical_cycle(const CriticalCycleSpec& spec, Exec exec = Exec::parallel);
// tau1 -> infinity, tau2 -> 0 limit of the same cycle
CycleOutcome adiabatic_cycle(const CriticalCycleSpec& spec);

struct Tau1Sweep {
    std::vector<double> tau1;
    std::vector<CycleOutcome> cycles;
};

// points in parallel, modes serial inside each point
Tau1Sweep sweep_tau1(const CriticalCycleSpec& spec, const std::vector<double>& tau1, Exec exec = Exec::parallel);
std::vector<double> log_grid(double lo, double hi, int n);

// fit of W - W_inf against tau1
ScalingFit work_scaling(const Tau1Sweep& sweep, double w_inf, FitOptions opts = {});

// prefactor R of W - W_inf = R tau1^exponent with the exponent held fixed
double work_prefactor(const Tau1Sweep& sweep, double w_inf, double exponent);

struct OptimalQuench {
    double tau_closed = 0.0;     // closed form
    double eta_hat = 0.0;        // efficiency at tau_closed from the scaling model
    double tau_search = 0.0;     // argmax of the measured output power
    double power_search = 0.0;   // output power -W/tau_cyc at tau_search
    bool interior = false;       // the search maximum is not at a bracket end
    bool closed_form_applicable = true;  // tau_cyc ~ tau1 at the optimum
};

// x = 1 crossing a critical point, x = 2 ending at one (d = nu = z = 1)
double optimal_tau_closed_form(double R, double w_inf, int x);
double efficiency_at_max_power(double w_inf, double q_in_inf, double excess);

OptimalQuench optimal_quench(const CriticalCycleSpec& spec, double R, double w_inf, double q_in_inf, int x,
                             double search_lo, double search_hi, int n_grid = 9);

// max over modes of 1 - eps_k(h_a) / eps_k(h_b)
double max_efficiency(const TfimSpec& chain, double h_a, double h_b);
ScalingFit max_efficiency_scaling(const std::vector<int>& sizes, double h_a, double h_b, FitOptions opts = {});

}  // namespace qtm
