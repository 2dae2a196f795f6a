#pragma once

#include <functional>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "qtm/collective_dynamics.hpp"

namespace qtm {

enum class WaveformKind { constant, sinusoidal, tabulated };

// omega(t) = omega0 + lambda * Omega * cos(Omega t) for the sinusoid; a table holds omega(t)
// sampled on an even grid over one period
struct ModulationSpec {
    double omega0 = 1.0;
    double Omega = 0.2;
    WaveformKind waveform = WaveformKind::sinusoidal;
    double lambda = 1.0;
    std::vector<double> table;
    int q_cutoff = 1;          // starting truncation, grown until the weight deficit is below tol
    double deficit_tol = 1e-6;
    int max_cutoff = 4096;

    void validate() const;
    double omega_at(double t) const;
};

struct HarmonicWeights {
    std::map<int, double> P;  // q -> P(q)
    double deficit = 0.0;
    int cutoff = 0;
};

HarmonicWeights harmonic_weights(const ModulationSpec& mod);

struct TwoBathSpec {
    BathSpec hot, cold;
    // max violation of the spectral separation on a probe grid; must stay below 1e-10
    double separation_violation(double omega0) const;
    void validate(double omega0) const;
};

// G_c flat on (0, omega0), G_h flat on (omega0, nu_max)
TwoBathSpec separated_flat_baths(double beta_h, double beta_c, double omega0, double gamma_h,
                                 double gamma_c, double nu_max = 1e6);

struct ChannelRates {
    double down = 0.0;  // J- channel, summed over baths and harmonics
    double up = 0.0;
};

ChannelRates floquet_rates(const HarmonicWeights& w, const ModulationSpec& mod, const TwoBathSpec& baths);
Eigen::MatrixXd floquet_generator(double j, const HarmonicWeights& w, const ModulationSpec& mod,
                                  const TwoBathSpec& baths);

double effective_temperature(const HarmonicWeights& w, const ModulationSpec& mod, const TwoBathSpec& baths);

// common multiplier k on both bath betas such that beta_eff = target (bisection in log k)
double tune_beta_scale(const HarmonicWeights& w, const ModulationSpec& mod, const TwoBathSpec& baths,
                       double target_beta_eff);

// <J+ J-> in the block Gibbs state at x = beta * omega
double lowering_correlator(double j, double x);

struct FloquetPower {
    double beta_eff = 0.0;
    double heat_hot = 0.0;   // J_h, into the medium
    double heat_cold = 0.0;
    double power = 0.0;      // -(J_h + J_c); negative when the machine runs as an engine
    bool engine = false;
};

// steady state of the block j, currents per bath
FloquetPower steady_power_block(double j, const HarmonicWeights& w, const ModulationSpec& mod,
                                const TwoBathSpec& baths);

enum class FloquetCoupling { collective, independent };

FloquetPower steady_power(const SpinEnsembleSpec& ens, const HarmonicWeights& w, const ModulationSpec& mod,
                          const TwoBathSpec& baths, FloquetCoupling coupling);

// P_col / P_ind at beta_eff * omega0 = x for N spins of size s
double power_ratio(int n_spins, double s, double x);

}  // namespace qtm
