#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qtm/spin_algebra.hpp"

namespace qtm {

// Thermal bath seen through its emission rate G(nu) at nu > 0; absorption follows
// from detailed balance G(-nu) = G(nu) exp(-beta nu).
struct BathSpec {
    double beta = 1.0;
    std::function<double(double)> emission;  // nu > 0 -> G(nu) >= 0
    std::string label = "bath";

    static BathSpec flat(double beta, double gamma, std::string label = "bath");
    double rate(double nu) const;
};

struct BlockPopulations {
    double j = 0.0;
    Eigen::VectorXd p;  // m = j ... -j
    double weight() const { return p.sum(); }
    double mean_m() const;
};

struct EnsembleState {
    std::vector<BlockPopulations> blocks;
    std::vector<double> degeneracy;  // l_j of each block, informational
    double energy(double omega) const;
    double total_weight() const;
};

// dp/dt = K p for a block with D[J-] at rate `down` and D[J+] at rate `up`
Eigen::MatrixXd birth_death_generator(double j, double down, double up);

double stable_step(double j, double down, double up);

// RK4 on the rate equation; throws std::domain_error when dt breaks the stability bound
BlockPopulations evolve_block_rates(const BlockPopulations& pops, double down, double up,
                                    double dt, double t_total);
BlockPopulations evolve_block(const BlockPopulations& pops, const BathSpec& bath, double omega,
                              double dt, double t_total);

// all blocks; parallel over blocks, serial twin kept for tests
EnsembleState evolve_ensemble(const EnsembleState& s, const BathSpec& bath, double omega,
                              double dt, double t_total);
EnsembleState evolve_ensemble_serial(const EnsembleState& s, const BathSpec& bath, double omega,
                                     double dt, double t_total);

BlockPopulations block_gibbs(double j, double beta, double omega, double weight = 1.0);
// e_j(beta) = omega <m> in the block Gibbs state
double block_gibbs_energy(double j, double beta, double omega);

// populations of one spin, m = s ... -s
Eigen::VectorXd independent_gibbs(const SpinEnsembleSpec& spec, double beta);

double collective_heat_capacity(double j, double beta, double omega);
double independent_heat_capacity(const SpinEnsembleSpec& spec, double beta);

// closed-form crossover T_cr of the j = Ns block against N independent spins
double critical_temperature(const SpinEnsembleSpec& spec);
// root of C_{Ns}(beta) - N C_s(beta) located numerically, returned as a temperature
double crossover_temperature_numeric(const SpinEnsembleSpec& spec);

double relative_entropy(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

// state with the given weight on each block of the decomposition, each block at inverse temperature beta0
EnsembleState ensemble_gibbs(const SpinEnsembleSpec& spec, const std::vector<double>& block_weights,
                             double beta0);
EnsembleState symmetric_gibbs(const SpinEnsembleSpec& spec, double beta0);

// time for |E(t) - E_ss| to drop to 1/e of its initial value, block started at beta0
double equilibration_time(double j, double beta0, const BathSpec& bath, double omega);

// Full 2^N reference for N spins-1/2: H = omega Jz with collective J- (rate `down`) and J+ (rate `up`)
// jumps, acting on column-stacked density matrices.
Eigen::MatrixXcd dicke_liouvillian(int n_spins, double omega, double down, double up);
// summed populations P(j, m) of a 2^N density matrix, one BlockPopulations per j (descending)
std::vector<BlockPopulations> coupled_populations(const Eigen::MatrixXcd& rho, int n_spins);

}  // namespace qtm
