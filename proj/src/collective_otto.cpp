#include "qtm/collective_otto.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qtm {

void CollectiveOttoSpec::validate() const
{
    ensemble.validate();
    if (!(beta_c > beta_h && beta_h >= 0.0)) throw std::invalid_argument("need beta_c > beta_h >= 0");
    if (!(vartheta_c > 0.0 && vartheta_h > 0.0)) throw std::invalid_argument("scale factors must be positive");
    if (gamma <= 0.0) throw std::invalid_argument("gamma must be positive");
    if (!block_weights.empty()) {
        double s = 0.0;
        for (double w : block_weights) s += w;
        if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("block weights must sum to 1");
    }
}

namespace {

EnsembleState initial_state(const CollectiveOttoSpec& spec, double beta, double vartheta)
{
    SpinEnsembleSpec e = spec.ensemble;
    e.omega = spec.ensemble.omega * vartheta;
    if (spec.coupling == Coupling::independent) {
        SpinEnsembleSpec one = e;
        one.n_spins = 1;
        return symmetric_gibbs(one, beta);
    }
    if (spec.block_weights.empty()) return symmetric_gibbs(e, beta);
    return ensemble_gibbs(e, spec.block_weights, beta);
}

}  // namespace

CollectiveMedium::CollectiveMedium(const CollectiveOttoSpec& spec)
    : spec_(spec), scale_(spec.vartheta_c),
      multiplier_(spec.coupling == Coupling::independent ? spec.ensemble.n_spins : 1.0)
{
    spec_.validate();
    state_ = initial_state(spec_, spec_.beta_c, spec_.vartheta_c);
}

double CollectiveMedium::energy() const
{
    return multiplier_ * state_.energy(spec_.ensemble.omega * scale_);
}

void CollectiveMedium::unitary(double, double to, double) { scale_ = to; }

void CollectiveMedium::dissipate(bool hot, double vartheta, double tau)
{
    scale_ = vartheta;
    const double beta = hot ? spec_.beta_h : spec_.beta_c;
    const double w = spec_.ensemble.omega * vartheta;
    if (std::isinf(tau)) {
        for (auto& b : state_.blocks) b = block_gibbs(b.j, beta, w, b.weight());
        return;
    }
    if (tau <= 0.0) return;
    const BathSpec bath = BathSpec::flat(beta, spec_.gamma);
    double jmax = 0.0;
    for (const auto& b : state_.blocks) jmax = std::max(jmax, b.j);
    const double h = 0.1 * stable_step(jmax, bath.rate(w), bath.rate(-w));
    const double steps = std::ceil(tau / h);
    state_ = evolve_ensemble_serial(state_, bath, w, tau / steps, tau);
}

double medium_gibbs_energy(const CollectiveOttoSpec& spec, double beta, double vartheta)
{
    const double w = spec.ensemble.omega * vartheta;
    if (spec.coupling == Coupling::independent)
        return spec.ensemble.n_spins * block_gibbs_energy(spec.ensemble.spin_s, beta, w);
    const EnsembleState s = initial_state(spec, beta, vartheta);
    return s.energy(w);
}

CycleOutcome steady_cycle_work(const CollectiveOttoSpec& spec)
{
    spec.validate();
    const double EA = medium_gibbs_energy(spec, spec.beta_c, spec.vartheta_c);
    const double EB = spec.vartheta_h / spec.vartheta_c * EA;
    const double EC = medium_gibbs_energy(spec, spec.beta_h, spec.vartheta_h);
    const double ED = spec.vartheta_c / spec.vartheta_h * EC;
    CycleOutcome out = make_outcome((EB - EA) + (ED - EC), EC - EB, EA - ED,
                                    std::numeric_limits<double>::infinity());
    if (spec.vartheta_c == spec.vartheta_h) out.efficiency = std::numeric_limits<double>::quiet_NaN();
    return out;
}

double critical_size(double T_h, double vartheta_h, double s, double omega)
{
    const double r = T_h / (omega * vartheta_h);
    return (3.0 * r * r - 0.25) / (s * (s + 1.0));
}

double critical_vartheta_h(double T_h, int n_spins, double s, double omega)
{
    return T_h * std::sqrt(12.0) / (omega * std::sqrt(4.0 * n_spins * s * (s + 1.0) + 1.0));
}

double max_work_independent(const CollectiveOttoSpec& spec)
{
    const double s = spec.ensemble.spin_s, w = spec.ensemble.omega;
    const double d_eta = spec.vartheta_c / spec.vartheta_h - spec.beta_h / spec.beta_c;
    return d_eta * spec.vartheta_h * spec.vartheta_h * spec.beta_c * w * w / 12.0
           * spec.ensemble.n_spins * ((2 * s + 1) * (2 * s + 1) - 1.0);
}

double max_work_collective(const CollectiveOttoSpec& spec)
{
    const double N = spec.ensemble.n_spins, s = spec.ensemble.spin_s;
    return (N * s + 1.0) / (s + 1.0) * max_work_independent(spec);
}

PowerRatio power_ratio_high_T(const CollectiveOttoSpec& spec)
{
    spec.validate();
    PowerRatio r;
    const double w = spec.ensemble.omega;
    const BathSpec hot = BathSpec::flat(spec.beta_h, spec.gamma);
    const BathSpec cold = BathSpec::flat(spec.beta_c, spec.gamma);
    // state B is the cold Gibbs state relabelled to vartheta_h, D the hot one relabelled to vartheta_c
    const double beta_B = spec.beta_c * spec.vartheta_c / spec.vartheta_h;
    const double beta_D = spec.beta_h * spec.vartheta_h / spec.vartheta_c;
    auto timing = [&](double j) {
        return equilibration_time(j, beta_B, hot, w * spec.vartheta_h)
               + equilibration_time(j, beta_D, cold, w * spec.vartheta_c);
    };
    CollectiveOttoSpec col = spec, ind = spec;
    col.coupling = Coupling::collective;
    col.block_weights.clear();
    ind.coupling = Coupling::independent;
    r.work_col = steady_cycle_work(col).work;
    r.work_ind = steady_cycle_work(ind).work;
    r.time_col = timing(spec.ensemble.max_j());
    r.time_ind = timing(spec.ensemble.spin_s);
    r.ratio = (r.work_col / r.time_col) / (r.work_ind / r.time_ind);
    return r;
}

OttoRun finite_time_cycle(const CollectiveOttoSpec& spec, double tau2, double tau4, int max_cycles)
{
    CollectiveMedium wm(spec);
    OttoProtocol pr;
    pr.vartheta_c = spec.vartheta_c;
    pr.vartheta_h = spec.vartheta_h;
    pr.tau2 = tau2;
    pr.tau4 = tau4;
    OttoRun run = run_otto(wm, pr, max_cycles);
    if (std::isinf(tau2) || std::isinf(tau4))
        for (auto& c : run.cycles) {
            c.cycle_time = std::numeric_limits<double>::infinity();
            c.power = 0.0;
        }
    return run;
}

}  // namespace qtm
