#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qtm/exec.hpp"

namespace qtm {

enum class GapKind { poisson, goe, meso };

struct SpectrumEnsemble {
    GapKind kind = GapKind::poisson;
    double mean_gap = 1.0;
    int dim = 400;          // matrix size for goe / meso
    double vartheta = 0.0;  // meso interpolation, 0 = GOE end, 1 = localized end
    std::uint64_t seed = 1;

    void validate() const;
};

// level-spacing laws at unit mean gap
double poisson_density(double s);
double goe_surmise_density(double s);
double poisson_cdf(double s);
double goe_surmise_cdf(double s);
// inverse of the surmise CDF, u in (0, 1)
double goe_surmise_quantile(double u);

enum class GapLaw { poisson, goe };
// sup |F_empirical - F_law| for gaps in units of their own mean
double ks_distance(std::vector<double> gaps, GapLaw law);

// bulk (central half) level spacings, locally unfolded over a window of 5% of the spectrum and
// rescaled to `mean_gap`
std::vector<double> unfolded_bulk_gaps(const Eigen::VectorXd& sorted_levels, double mean_gap);

// GOE with unit off-diagonal variance; mean bulk gap ~ pi / sqrt(dim)
Eigen::MatrixXd sample_goe(int dim, std::uint64_t seed, std::uint64_t index);
// diagonal with independent uniform levels at the GOE centre density
Eigen::MatrixXd sample_localized(int dim, std::uint64_t seed, std::uint64_t index);
// (1 - v) H_GOE + v H_loc, without the scale renormalization
Eigen::MatrixXd sample_meso(int dim, double vartheta, std::uint64_t seed, std::uint64_t index);

// empirical renormalization: mean raw bulk gap at this vartheta divided by the target mean gap,
// estimated from `n_calib` instances on a stream disjoint from sample_gaps
double meso_kappa(int dim, double vartheta, double mean_gap, std::uint64_t seed, int n_calib = 32);
// bulk mean gap of fresh instances after dividing by the calibrated kappa
double meso_renormalized_mean_gap(int dim, double vartheta, double mean_gap, std::uint64_t seed, int n_instances);

// throws std::invalid_argument when dim < 50
std::vector<double> sample_gaps(const SpectrumEnsemble& ens, std::size_t count, Exec exec = Exec::parallel);

struct MblCycleParams {
    double bandwidth = 0.02;  // cold-bath bandwidth
    double beta_c = 100.0;
    double beta_h = 0.0;      // 0 means infinite hot temperature
    double mean_gap = 1.0;

    void validate() const;
};

struct MblCycleEstimate {
    double work = 0.0;  // mean work on the medium per cycle; negative for an engine
    double work_stderr = 0.0;
    double heat_hot = 0.0;
    double heat_hot_stderr = 0.0;
    double efficiency = 0.0;
    double efficiency_stderr = 0.0;
    std::size_t n_samples = 0;
};

// one two-level subengine per sample: hot gap from the GOE surmise, cold gap Poisson,
// cold exchange only when the cold gap fits inside the bath bandwidth
struct PairCycle {
    double work, heat_hot, heat_cold;
};
PairCycle pair_cycle(const MblCycleParams& p, double gap_hot, double gap_cold);

MblCycleEstimate mbl_cycle_monte_carlo(const MblCycleParams& p, std::size_t n_samples, std::uint64_t seed,
                                       Exec exec = Exec::parallel);

double mbl_work_closed_form(const MblCycleParams& p);
double mbl_efficiency_closed_form(const MblCycleParams& p);

struct GaahSpec {
    int n_sites = 1000;
    double t = 1.0;
    double theta = 0.6;
    double alpha = 0.5;
    double phi = 0.0;
    double nu = 0.6180339887498949;  // golden-ratio conjugate

    void validate() const;
    double onsite(int i) const;
};

struct GaahSpectrum {
    Eigen::VectorXd energies;
    Eigen::MatrixXd states;  // columns
    Eigen::VectorXd ipr;
};

// open chain, hopping -t, onsite 2 theta cos(x) / (1 - alpha cos(x)) with x = 2 pi nu i + phi
Eigen::MatrixXd gaah_hamiltonian(const GaahSpec& s);
GaahSpectrum gaah_build(const GaahSpec& s);
double inverse_participation_ratio(const Eigen::VectorXd& psi);

// sgn(theta)(|t| - |theta|) / alpha as printed, and the twice-larger form
double gaah_mobility_edge_printed(const GaahSpec& s);
double gaah_mobility_edge(const GaahSpec& s);
// localized iff sgn(alpha theta)(E - E_c) > 0
bool localized_side(const GaahSpec& s, double energy, double edge);

struct EdgeClassification {
    double alpha = 0.0, theta = 0.0;
    std::size_t n_states = 0;
    double fraction_localized = 0.0;
    double misclassified_printed = 0.0;  // fraction disagreeing with the printed edge
    double misclassified_scaled = 0.0;   // fraction disagreeing with the factor-2 edge
    double measured_edge = 0.0;          // threshold minimizing disagreement with the IPR labels
    double measured_misclassified = 0.0;
};

double ipr_threshold(int n_sites);

// phase-averaged IPR classification at one (alpha, theta)
EdgeClassification classify_edge(const GaahSpec& base, int n_phases, Exec exec = Exec::parallel);
std::vector<EdgeClassification> mobility_edge_report(const GaahSpec& base, const std::vector<double>& alphas,
                                                     const std::vector<double>& thetas, int n_phases,
                                                     Exec exec = Exec::parallel);

}  // namespace qtm
