#pragma once

#include <vector>

#include "qtm/collective_dynamics.hpp"
#include "qtm/thermo.hpp"

namespace qtm {

enum class Coupling { collective, independent };

struct CollectiveOttoSpec {
    SpinEnsembleSpec ensemble;
    double vartheta_c = 0.5;
    double vartheta_h = 1.0;
    double beta_c = 2.0;
    double beta_h = 0.5;
    Coupling coupling = Coupling::collective;
    std::vector<double> block_weights;  // empty: all weight on j = Ns
    double gamma = 1.0;                 // flat bath rate for both baths

    void validate() const;
};

// Dicke-block working medium with H = vartheta * omega * Jz; unitary strokes relabel the scale
class CollectiveMedium : public OttoMedium {
public:
    explicit CollectiveMedium(const CollectiveOttoSpec& spec);
    double energy() const override;
    void unitary(double from, double to, double tau) override;
    void dissipate(bool hot, double vartheta, double tau) override;

    const EnsembleState& state() const { return state_; }
    double scale() const { return scale_; }

private:
    CollectiveOttoSpec spec_;
    EnsembleState state_;  // for independent coupling: one spin, energy multiplied by N
    double scale_;
    double multiplier_;
};

// Gibbs energy of the medium at inverse temperature beta and scale vartheta
double medium_gibbs_energy(const CollectiveOttoSpec& spec, double beta, double vartheta);

CycleOutcome steady_cycle_work(const CollectiveOttoSpec& spec);

double critical_size(double T_h, double vartheta_h, double s, double omega);
double critical_vartheta_h(double T_h, int n_spins, double s, double omega);

// W_max bounds from the high-temperature expansion
double max_work_independent(const CollectiveOttoSpec& spec);
double max_work_collective(const CollectiveOttoSpec& spec);

struct PowerRatio {
    double ratio = 1.0;
    double work_col = 0.0, work_ind = 0.0;
    double time_col = 0.0, time_ind = 0.0;  // tau_2 + tau_4 from 1/e equilibration
};

// full-thermalization cycles timed by the 1/e equilibration of each bath stroke
PowerRatio power_ratio_high_T(const CollectiveOttoSpec& spec);

OttoRun finite_time_cycle(const CollectiveOttoSpec& spec, double tau2, double tau4, int max_cycles = 20000);

}  // namespace qtm
