#pragma once

#include <functional>

#include "qtm/thermo.hpp"

namespace qtm {

enum class Statistics { boson, fermion };
enum class RampShape { linear, smooth };

// trap frequency schedule between two values; `smooth` is the cubic 3s^2 - 2s^3 profile
struct FrequencyRamp {
    double from = 1.0;
    double to = 2.0;
    double duration = 1.0;
    RampShape shape = RampShape::linear;

    double at(double t) const;
};

// ratio of the post-ramp mean energy to its adiabatic value for one oscillator mode.
// Zero duration is treated as a sudden switch.
double q_star(const FrequencyRamp& ramp, double tol = 1e-11);
double q_star(const std::function<double(double)>& omega, double duration, double tol = 1e-11);
double sudden_q_star(double omega_from, double omega_to);

// canonical mean energy of N non-interacting particles in a 1D harmonic trap (hbar = m = 1)
double trap_energy(int n_particles, Statistics stats, double omega, double temperature);

struct TrapCycleSpec {
    int n_particles = 1;
    Statistics stats = Statistics::fermion;
    double vartheta_c = 1.0;
    double vartheta_h = 2.0;
    double T_c = 1.0;
    double T_h = 10.0;
    double tau_ramp = 1.0;   // each unitary stroke
    double tau_bath = 1.0;   // each thermalization stroke
    RampShape shape = RampShape::linear;

    void validate() const;
    double cycle_time() const { return 2.0 * (tau_ramp + tau_bath); }
};

struct NonadiabaticityFactors {
    double q_ab = 1.0;
    double q_cd = 1.0;
};

NonadiabaticityFactors stroke_factors(const TrapCycleSpec& spec);

double nonadiabatic_work(const TrapCycleSpec& spec, const NonadiabaticityFactors& f);
double nonadiabatic_efficiency(const TrapCycleSpec& spec, const NonadiabaticityFactors& f);
// work, heats, efficiency and output-power bookkeeping for one limit cycle
CycleOutcome nonadiabatic_cycle(const TrapCycleSpec& spec, const NonadiabaticityFactors& f);
CycleOutcome nonadiabatic_cycle(const TrapCycleSpec& spec);

struct PowerOptimum {
    double ratio = 0.0;  // vartheta_c / vartheta_h at the optimum
    double power = 0.0;  // output power -W / tau_cyc
    double efficiency = 0.0;
    NonadiabaticityFactors factors;
    bool interior = false;
};

// maximize output power over vartheta_c/vartheta_h in [ratio_lo, ratio_hi] with vartheta_c fixed
PowerOptimum optimize_power(const TrapCycleSpec& spec, double ratio_lo = 0.02, double ratio_hi = 0.98,
                            double tol = 1e-6);

struct AdvantageRatios {
    double r = 1.0;    // P(N) / (N P(1))
    double rho = 1.0;  // eta(N) / eta(1)
    PowerOptimum many, single;
    bool advantage() const { return r > 1.0 && rho > 1.0; }
};

// throws std::runtime_error when either machine has no engine regime in the ratio window
AdvantageRatios advantage_ratios(const TrapCycleSpec& spec);

}  // namespace qtm
