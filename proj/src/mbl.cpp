#include "qtm/mbl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "qtm/rng.hpp"

namespace qtm {

namespace {

constexpr double pi = std::numbers::pi;

enum Stream : std::uint64_t { gap_stream = 1, calib_stream = 2, hot_stream = 3, cold_stream = 4 };

double bulk_mean_gap(const Eigen::VectorXd& levels)
{
    const Eigen::Index d = levels.size(), lo = d / 4, hi = 3 * d / 4;
    return (levels[hi] - levels[lo]) / double(hi - lo);
}

Eigen::VectorXd sorted_levels(const Eigen::MatrixXd& h)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues();  // ascending
}

}  // namespace

void SpectrumEnsemble::validate() const
{
    if (!(mean_gap > 0.0)) throw std::invalid_argument("SpectrumEnsemble: mean_gap must be positive");
    if (kind != GapKind::poisson && dim < 50)
        throw std::invalid_argument("SpectrumEnsemble: dim too small for stable unfolding (need >= 50)");
    if (kind == GapKind::meso && !(vartheta >= 0.0 && vartheta <= 1.0))
        throw std::invalid_argument("SpectrumEnsemble: vartheta must lie in [0, 1]");
}

double poisson_density(double s) { return s < 0.0 ? 0.0 : std::exp(-s); }
double goe_surmise_density(double s) { return s < 0.0 ? 0.0 : 0.5 * pi * s * std::exp(-0.25 * pi * s * s); }
double poisson_cdf(double s) { return s <= 0.0 ? 0.0 : -std::expm1(-s); }
double goe_surmise_cdf(double s) { return s <= 0.0 ? 0.0 : -std::expm1(-0.25 * pi * s * s); }
double goe_surmise_quantile(double u) { return std::sqrt(-4.0 * std::log1p(-u) / pi); }

double ks_distance(std::vector<double> gaps, GapLaw law)
{
    if (gaps.empty()) throw std::invalid_argument("ks_distance: no samples");
    double mean = 0.0;
    for (double g : gaps) mean += g;
    mean /= double(gaps.size());
    std::sort(gaps.begin(), gaps.end());
    const double n = double(gaps.size());
    double d = 0.0;
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        const double s = gaps[i] / mean;
        const double f = law == GapLaw::poisson ? poisson_cdf(s) : goe_surmise_cdf(s);
        d = std::max({d, std::abs(f - double(i) / n), std::abs(double(i + 1) / n - f)});
    }
    return d;
}

std::vector<double> unfolded_bulk_gaps(const Eigen::VectorXd& e, double mean_gap)
{
    const Eigen::Index d = e.size();
    if (d < 50) throw std::invalid_argument("unfolded_bulk_gaps: need at least 50 levels");
    const Eigen::Index w = std::max<Eigen::Index>(2, std::lround(0.025 * double(d)));
    std::vector<double> out;
    out.reserve(d / 2);
    for (Eigen::Index i = d / 4; i < 3 * d / 4; ++i) {
        const Eigen::Index lo = std::max<Eigen::Index>(i - w, 0), hi = std::min<Eigen::Index>(i + 1 + w, d - 1);
        const double local = (e[hi] - e[lo]) / double(hi - lo);
        out.push_back(mean_gap * (e[i + 1] - e[i]) / local);
    }
    return out;
}

Eigen::MatrixXd sample_goe(int dim, std::uint64_t seed, std::uint64_t index)
{
    CounterRng rng(seed, index, gap_stream);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd h(dim, dim);
    for (int i = 0; i < dim; ++i) {
        h(i, i) = std::sqrt(2.0) * normal(rng);
        for (int j = i + 1; j < dim; ++j) h(i, j) = h(j, i) = normal(rng);
    }
    return h;
}

Eigen::MatrixXd sample_localized(int dim, std::uint64_t seed, std::uint64_t index)
{
    CounterRng rng(seed, index, gap_stream + 100);
    const double width = pi * std::sqrt(double(dim));
    Eigen::VectorXd diag(dim);
    for (int i = 0; i < dim; ++i) diag[i] = width * (rng.uniform() - 0.5);
    return diag.asDiagonal();
}

Eigen::MatrixXd sample_meso(int dim, double v, std::uint64_t seed, std::uint64_t index)
{
    return (1.0 - v) * sample_goe(dim, seed, index) + v * sample_localized(dim, seed, index);
}

double meso_kappa(int dim, double v, double mean_gap, std::uint64_t seed, int n_calib)
{
    double acc = 0.0;
    for (int k = 0; k < n_calib; ++k)
        acc += bulk_mean_gap(sorted_levels(sample_meso(dim, v, splitmix64(seed ^ calib_stream), k)));
    return acc / n_calib / mean_gap;
}

std::vector<double> sample_gaps(const SpectrumEnsemble& ens, std::size_t count, Exec exec)
{
    ens.validate();
    std::vector<double> out;
    if (ens.kind == GapKind::poisson) {
        out.resize(count);
        parallel_for(count, exec, [&](std::size_t i) {
            CounterRng rng(ens.seed, i, gap_stream);
            out[i] = -ens.mean_gap * std::log(rng.uniform());
        });
        return out;
    }
    const std::size_t per = std::size_t(ens.dim) / 2;
    const std::size_t n_inst = (count + per - 1) / per;
    std::vector<std::vector<double>> chunks(n_inst);
    parallel_for(n_inst, exec, [&](std::size_t k) {
        const Eigen::MatrixXd h = ens.kind == GapKind::goe ? sample_goe(ens.dim, ens.seed, k)
                                                           : sample_meso(ens.dim, ens.vartheta, ens.seed, k);
        chunks[k] = unfolded_bulk_gaps(sorted_levels(h), ens.mean_gap);
    });
    out.reserve(n_inst * per);
    for (auto& c : chunks) out.insert(out.end(), c.begin(), c.end());
    out.resize(std::min(count, out.size()));
    return out;
}

double meso_renormalized_mean_gap(int dim, double v, double mean_gap, std::uint64_t seed, int n_instances)
{
    const double kappa = meso_kappa(dim, v, mean_gap, seed);
    double acc = 0.0;
    for (int k = 0; k < n_instances; ++k) acc += bulk_mean_gap(sorted_levels(sample_meso(dim, v, seed, k)));
    return acc / n_instances / kappa;
}

void MblCycleParams::validate() const
{
    if (!(mean_gap > 0.0 && bandwidth > 0.0 && beta_c > 0.0 && beta_h >= 0.0 && beta_h < beta_c))
        throw std::invalid_argument("MblCycleParams: need mean_gap, bandwidth > 0 and beta_c > beta_h >= 0");
}

PairCycle pair_cycle(const MblCycleParams& p, double gap_hot, double gap_cold)
{
    const double p_hot = p.beta_h > 0.0 ? 1.0 / (1.0 + std::exp(p.beta_h * gap_hot)) : 0.5;
    const double p_cold = gap_cold <= p.bandwidth ? 1.0 / (1.0 + std::exp(p.beta_c * gap_cold)) : p_hot;
    const double dp = p_cold - p_hot;
    return {(gap_hot - gap_cold) * dp, -gap_hot * dp, gap_cold * dp};
}

MblCycleEstimate mbl_cycle_monte_carlo(const MblCycleParams& p, std::size_t n, std::uint64_t seed, Exec exec)
{
    p.validate();
    if (n < 2) throw std::invalid_argument("mbl_cycle_monte_carlo: need at least two samples");
    // A T = infinity spectrum carries population 2/d per adjacent pair over ~d pairs: each
    // subengine counts twice.
    constexpr double weight = 2.0;
    constexpr std::size_t chunk = 1 << 14;
    struct Sums {
        double w = 0, w2 = 0, q = 0, q2 = 0, wq = 0;
    };
    const std::size_t n_chunks = (n + chunk - 1) / chunk;
    std::vector<Sums> part(n_chunks);
    parallel_for(n_chunks, exec, [&](std::size_t c) {
        Sums s;
        for (std::size_t i = c * chunk; i < std::min(n, (c + 1) * chunk); ++i) {
            CounterRng rng(seed, i, hot_stream);
            const double gh = p.mean_gap * goe_surmise_quantile(rng.uniform());
            const double gc = -p.mean_gap * std::log(rng.uniform());
            const PairCycle pc = pair_cycle(p, gh, gc);
            const double w = weight * pc.work, q = weight * pc.heat_hot;
            s.w += w;
            s.w2 += w * w;
            s.q += q;
            s.q2 += q * q;
            s.wq += w * q;
        }
        part[c] = s;
    });
    Sums t;
    for (const Sums& s : part) {
        t.w += s.w;
        t.w2 += s.w2;
        t.q += s.q;
        t.q2 += s.q2;
        t.wq += s.wq;
    }
    const double nn = double(n);
    const double mw = t.w / nn, mq = t.q / nn;
    const double vw = (t.w2 / nn - mw * mw) * nn / (nn - 1.0);
    const double vq = (t.q2 / nn - mq * mq) * nn / (nn - 1.0);
    const double cwq = (t.wq / nn - mw * mq) * nn / (nn - 1.0);
    MblCycleEstimate out;
    out.n_samples = n;
    out.work = mw;
    out.work_stderr = std::sqrt(vw / nn);
    out.heat_hot = mq;
    out.heat_hot_stderr = std::sqrt(vq / nn);
    out.efficiency = -mw / mq;
    const double eta = out.efficiency;
    out.efficiency_stderr = std::sqrt(std::max(0.0, vw + eta * eta * vq + 2.0 * eta * cwq) / nn) / std::abs(mq);
    return out;
}

double mbl_work_closed_form(const MblCycleParams& p) { return -p.bandwidth + 2.0 * std::numbers::ln2 / p.beta_c; }
double mbl_efficiency_closed_form(const MblCycleParams& p) { return 1.0 - p.bandwidth / (2.0 * p.mean_gap); }

void GaahSpec::validate() const
{
    if (n_sites < 2) throw std::invalid_argument("GaahSpec: need at least two sites");
    if (!(std::abs(alpha) < 1.0)) throw std::invalid_argument("GaahSpec: |alpha| must be < 1");
    if (t == 0.0) throw std::invalid_argument("GaahSpec: hopping must be nonzero");
}

double GaahSpec::onsite(int i) const
{
    const double c = std::cos(2.0 * pi * nu * i + phi);
    return 2.0 * theta * c / (1.0 - alpha * c);
}

Eigen::MatrixXd gaah_hamiltonian(const GaahSpec& s)
{
    s.validate();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(s.n_sites, s.n_sites);
    for (int i = 0; i < s.n_sites; ++i) {
        h(i, i) = s.onsite(i);
        if (i + 1 < s.n_sites) h(i, i + 1) = h(i + 1, i) = -s.t;
    }
    return h;
}

double inverse_participation_ratio(const Eigen::VectorXd& psi)
{
    const double n2 = psi.squaredNorm();
    return psi.array().square().square().sum() / (n2 * n2);
}

GaahSpectrum gaah_build(const GaahSpec& s)
{
    s.validate();
    Eigen::VectorXd diag(s.n_sites), sub = Eigen::VectorXd::Constant(s.n_sites - 1, -s.t);
    for (int i = 0; i < s.n_sites; ++i) diag[i] = s.onsite(i);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    GaahSpectrum out{es.eigenvalues(), es.eigenvectors(), Eigen::VectorXd(s.n_sites)};
    for (int k = 0; k < s.n_sites; ++k) out.ipr[k] = inverse_participation_ratio(out.states.col(k));
    return out;
}

double gaah_mobility_edge_printed(const GaahSpec& s)
{
    const double gap = std::abs(s.t) - std::abs(s.theta);
    if (s.alpha == 0.0) return gap == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), s.theta * gap);
    return std::copysign(1.0, s.theta) * gap / s.alpha;
}

double gaah_mobility_edge(const GaahSpec& s) { return 2.0 * gaah_mobility_edge_printed(s); }

bool localized_side(const GaahSpec& s, double energy, double edge)
{
    if (s.alpha == 0.0) return std::abs(s.theta) > std::abs(s.t);
    const double sign = (s.alpha * s.theta) >= 0.0 ? 1.0 : -1.0;
    return sign * (energy - edge) > 0.0;
}

double ipr_threshold(int n_sites) { return 1.0 / std::sqrt(double(n_sites)); }

EdgeClassification classify_edge(const GaahSpec& base, int n_phases, Exec exec)
{
    base.validate();
    if (n_phases < 1) throw std::invalid_argument("classify_edge: need at least one phase");
    std::vector<GaahSpectrum> spectra(n_phases);
    parallel_for(std::size_t(n_phases), exec, [&](std::size_t k) {
        GaahSpec s = base;
        s.phi = 2.0 * pi * (double(k) + 0.5) / n_phases;
        spectra[k] = gaah_build(s);
    });
    const double thr = ipr_threshold(base.n_sites);
    const double e_printed = gaah_mobility_edge_printed(base), e_scaled = gaah_mobility_edge(base);
    std::vector<std::pair<double, bool>> states;
    for (const auto& sp : spectra)
        for (Eigen::Index k = 0; k < sp.energies.size(); ++k) states.emplace_back(sp.energies[k], sp.ipr[k] > thr);
    std::sort(states.begin(), states.end());

    EdgeClassification out;
    out.alpha = base.alpha;
    out.theta = base.theta;
    out.n_states = states.size();
    std::size_t n_loc = 0, bad_p = 0, bad_s = 0;
    for (const auto& [e, loc] : states) {
        n_loc += loc;
        bad_p += loc != localized_side(base, e, e_printed);
        bad_s += loc != localized_side(base, e, e_scaled);
    }
    const double n = double(states.size());
    out.fraction_localized = double(n_loc) / n;
    out.misclassified_printed = double(bad_p) / n;
    out.misclassified_scaled = double(bad_s) / n;

    // sweep a threshold across the sorted energies; localized above it when alpha theta > 0
    const bool above = base.alpha * base.theta >= 0.0;
    std::size_t below_bad = 0, above_bad = 0;
    for (const auto& st : states) above_bad += above ? !st.second : st.second;
    std::size_t best = below_bad + above_bad, best_i = 0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const bool loc = states[i].second;
        below_bad += above ? loc : !loc;
        above_bad -= above ? !loc : loc;
        if (below_bad + above_bad < best) {
            best = below_bad + above_bad;
            best_i = i + 1;
        }
    }
    if (best_i == 0)
        out.measured_edge = states.front().first;
    else if (best_i == states.size())
        out.measured_edge = states.back().first;
    else
        out.measured_edge = 0.5 * (states[best_i - 1].first + states[best_i].first);
    out.measured_misclassified = double(best) / n;
    return out;
}

std::vector<EdgeClassification> mobility_edge_report(const GaahSpec& base, const std::vector<double>& alphas,
                                                     const std::vector<double>& thetas, int n_phases, Exec exec)
{
    std::vector<EdgeClassification> out;
    for (double a : alphas)
        for (double th : thetas) {
            GaahSpec s = base;
            s.alpha = a;
            s.theta = th;
            out.push_back(classify_edge(s, n_phases, exec));
        }
    return out;
}

}  // namespace qtm
