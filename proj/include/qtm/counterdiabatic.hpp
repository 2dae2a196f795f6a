#pragma once

#include <vector>

#include <Eigen/Dense>

#include "qtm/thermo.hpp"

namespace qtm {

// one set of chain couplings: H0 = -sum h_j sx_j - sum b_j sz_j - sum J_j sz_j sz_{j+1}, periodic
struct ChainParams {
    std::vector<double> h, b, J;
    int size() const { return static_cast<int>(h.size()); }
    ChainParams lerp(const ChainParams& to, double s) const;
};

// s(t) = sin^2[(pi/2) sin^2(pi t / (2 tau))]
double ramp_shape(double t, double tau);
double ramp_shape_rate(double t, double tau);

struct SpinChainSpec {
    ChainParams initial, final_;
    double tau = 1.0;
    void validate() const;
    ChainParams at(double t) const { return initial.lerp(final_, ramp_shape(t, tau)); }
};

Eigen::MatrixXcd chain_hamiltonian(const ChainParams& p);
// dense Pauli sigma^y on site j of an n-site register; bit j of the basis index is 0 for spin up
Eigen::MatrixXcd pauli_y(int n, int j);

// <m|A|n> = i <m|dH|n> / (E_n - E_m) in the eigenbasis of H; elements inside subspaces with gap
// below `degenerate_gap` are zeroed and counted
struct GaugeResult {
    Eigen::MatrixXcd A;
    int degenerate_pairs = 0;
};
GaugeResult exact_gauge(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& dH, double degenerate_gap = 1e-10);

// minimizer of Tr[G^2], G = dH + i[A*, H], over A* = sum_b c_b basis_b (pseudo-inverse on the normal equations)
struct VariationalResult {
    Eigen::VectorXd coeff;
    bool singular = false;
};
VariationalResult variational_gauge(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& dH,
                                    const std::vector<Eigen::MatrixXcd>& basis);

// closed-form single-site sigma^y coefficients given the parameters and their derivatives
std::vector<double> local_zeta(const ChainParams& p, const ChainParams& dp);

enum class ControlKind { none, local, exact };

struct StrokeOptions {
    ControlKind control = ControlKind::none;
    double vartheta0 = 1.0;
    double max_phase_step = 0.25; // bound on ||H|| dt for the RK4 propagator
    int min_steps = 32;
    bool record_work = true;  // sample the work integrands; off when only the final state matters
};

struct StrokeResult {
    Eigen::MatrixXcd rho;
    double w0 = 0.0;   // int Tr[rho dH0/dt]
    double wcd = 0.0;  // int Tr[rho dHcd/dt]
    double max_cd_power = 0.0;  // max |Tr[rho dHcd/dt]| over the samples
    int steps = 0;
};

StrokeResult run_stroke(const SpinChainSpec& spec, const Eigen::MatrixXcd& rho0, const StrokeOptions& opt);

Eigen::MatrixXcd gibbs_state(const Eigen::MatrixXcd& H, double temperature);
// adiabatic image of rho0: eigen-populations of rho0 in the H_from basis carried over to the H_to basis
Eigen::MatrixXcd adiabatic_target(const Eigen::MatrixXcd& rho0, const Eigen::MatrixXcd& H_from,
                                  const Eigen::MatrixXcd& H_to);
double fidelity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma);

struct WorkSplit {
    double w0 = 0.0;
    double wcd = 0.0;
    double total() const { return w0 + wcd; }
};

struct StaCycleSpec {
    SpinChainSpec chain;  // stroke 1 runs initial -> final_, stroke 3 back
    double T_c = 0.22, T_h = 22.0;
    double tau2 = 0.1, tau4 = 0.1;
};

struct StaOutcome {
    CycleOutcome cycle;  // work = W0 + Wcd, power = W0 / tau_cyc, efficiency per the sign of Wcd
    WorkSplit split;
    double fidelity_ab = 0.0, fidelity_cd = 0.0;
    double vartheta0 = 0.0;
};

double hybrid_efficiency(double w0, double wcd, double q_hot);

StaOutcome run_sta_otto(const StaCycleSpec& spec, const StrokeOptions& opt);

// golden-section maximization of the A->B stroke fidelity over [0, 1] to `tol`; endpoints are also compared
double optimize_vartheta0(const StaCycleSpec& spec, StrokeOptions opt, double tol = 1e-4);

}  // namespace qtm
