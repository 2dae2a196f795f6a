#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qtm/exec.hpp"

namespace qtm {


// periodic transverse-field Ising chain, even-parity sector: k = (2m-1) pi / N, m = 1..N/2
struct TfimSpec {
    int n_sites = 100;
    double J = 1.0;
    void validate() const;
    std::vector<double> momenta() const;  // k > 0 of each +-k pair
};

// h(t) = h_start + (h_end - h_start) t / duration
struct LinearRamp {
    double h_start = 2.0;
    double h_end = 0.0;
    double duration = 1.0;
    double h(double t) const { return h_start + (h_end - h_start) * t / duration; }
    double rate() const { return (h_end - h_start) / duration; }
};

// ramp at speed |dh/dt| = 1/tau
LinearRamp kz_ramp(double h_start, double h_end, double tau);

double mode_energy(double k, double h, double J);
std::vector<double> spectrum(const TfimSpec& spec, double h);
double spectral_gap(const TfimSpec& spec, double h);
double ground_energy(const TfimSpec& spec, double h);

// pair block on {|0>, c_k^+ c_-k^+ |0>}; the odd states c_k^+|0>, c_-k^+|0> sit at -2(h + J cos k)
Eigen::Matrix2d pair_hamiltonian(double k, double h, double J);
// full pair block on {|0>, |k,-k>, |k>, |-k>}
Eigen::Matrix4cd pair_hamiltonian4(double k, double h, double J);
// ground and excited eigenvectors of the 2x2 pair block
Eigen::Matrix2d pair_eigenvectors(double k, double h, double J);

struct ModeEnsembleState {
    std::vector<double> k;
    std::vector<Eigen::Vector2cd> amp;  // closed: (u_k, v_k) on {|0>, |k,-k>}
    std::vector<Eigen::Matrix4cd> rho;  // open: pair density matrices
    bool open() const { return !rho.empty(); }
};

ModeEnsembleState ground_state(const TfimSpec& spec, double h);
ModeEnsembleState to_density(const ModeEnsembleState& s);

enum class LindbladKind { create, annihilate, dephase };

struct DissipationSpec {
    LindbladKind kind = LindbladKind::create;
    double kappa = 0.0;
};

struct OdeTolerance {
    double abs = 1e-9;
    double rel = 1e-9;
};

ModeEnsembleState evolve_closed(const TfimSpec& spec, const ModeEnsembleState& s, const LinearRamp& ramp,
                                OdeTolerance tol = {}, Exec exec = Exec::parallel);
ModeEnsembleState evolve_open(const TfimSpec& spec, const ModeEnsembleState& s, const LinearRamp& ramp,
                              const DissipationSpec& diss, OdeTolerance tol = {}, Exec exec = Exec::parallel);

// quasiparticle occupation of each +-k pair per momentum (0..1) at field h
std::vector<double> excitation_probabilities(const TfimSpec& spec, const ModeEnsembleState& s, double h);
double excitation_energy(const TfimSpec& spec, const ModeEnsembleState& s, double h);
double defect_density(const TfimSpec& spec, const ModeEnsembleState& s, double h);
// sum_i <sigma^z_i> with sigma^z = 2 n - 1
double magnetization(const ModeEnsembleState& s);

// excitation energy after a sudden jump h_i -> h_f from the ground state of h_i
double sudden_quench_energy(const TfimSpec& spec, double h_i, double h_f);

// ground-to-excited transition probability of every pair over a ramp, by a fourth-order Magnus
// stepper with exact 2x2 exponentials; max_phase bounds eps_k * dt, max_dt bounds dt
std::vector<double> ramp_transition_probabilities(const TfimSpec& spec, const LinearRamp& ramp,
                                                  double max_phase = 0.2, double max_dt = 0.05,
                                                  Exec exec = Exec::parallel);

}  // namespace qtm
