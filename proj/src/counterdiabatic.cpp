#include "qtm/counterdiabatic.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include "qtm/fit.hpp"

namespace qtm {

using cd = std::complex<double>;
using RowMat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

ChainParams ChainParams::lerp(const ChainParams& to, double s) const
{
    ChainParams p = *this;
    for (int j = 0; j < size(); ++j) {
        p.h[j] += s * (to.h[j] - h[j]);
        p.b[j] += s * (to.b[j] - b[j]);
        p.J[j] += s * (to.J[j] - J[j]);
    }
    return p;
}

double ramp_shape(double t, double tau)
{
    const double u = std::sin(std::numbers::pi * t / (2.0 * tau));
    const double v = std::sin(0.5 * std::numbers::pi * u * u);
    return v * v;
}

double ramp_shape_rate(double t, double tau)
{
    const double u = std::numbers::pi * t / (2.0 * tau);
    const double phi = 0.5 * std::numbers::pi * std::sin(u) * std::sin(u);
    return std::sin(2.0 * phi) * 0.5 * std::numbers::pi * std::sin(2.0 * u) * std::numbers::pi / (2.0 * tau);
}

void SpinChainSpec::validate() const
{
    const int n = initial.size();
    if (n < 1 || n > 12) throw std::invalid_argument("chain size must be in [1, 12]");
    for (const ChainParams* p : {&initial, &final_})
        if (p->size() != n || static_cast<int>(p->b.size()) != n || static_cast<int>(p->J.size()) != n)
            throw std::invalid_argument("chain parameter vectors must all have n entries");
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
}

namespace {

inline double zsign(int r, int j) { return ((r >> j) & 1) ? -1.0 : 1.0; }

// H = diag + sum_j flip_j with flip coefficient -h_j + y_j * (bit_j(r) ? +i : -i)
struct PauliChain {
    int n = 0;
    Eigen::VectorXd diag;
    std::vector<double> x, y;

    PauliChain(const ChainParams& p, const std::vector<double>& ycoef) : n(p.size()), x(p.size()), y(ycoef)
    {
        const int dim = 1 << n;
        diag.setZero(dim);
        for (int r = 0; r < dim; ++r) {
            double d = 0.0;
            for (int j = 0; j < n; ++j) {
                d -= p.b[j] * zsign(r, j);
                if (n > 1) d -= p.J[j] * zsign(r, j) * zsign(r, (j + 1) % n);
            }
            diag[r] = d;
        }
        for (int j = 0; j < n; ++j) x[j] = -p.h[j];
        if (y.empty()) y.assign(n, 0.0);
    }

    cd flip(int r, int j) const { return cd(x[j], ((r >> j) & 1) ? y[j] : -y[j]); }

    void apply(const RowMat& X, RowMat& out) const
    {
        const int dim = static_cast<int>(diag.size());
        out.noalias() = diag.cast<cd>().asDiagonal() * X;
        for (int j = 0; j < n; ++j) {
            const int m = 1 << j;
            const cd c0(x[j], -y[j]), c1(x[j], y[j]);
            for (int base = 0; base < dim; base += 2 * m) {
                out.middleRows(base, m) += c0 * X.middleRows(base + m, m);
                out.middleRows(base + m, m) += c1 * X.middleRows(base, m);
            }
        }
    }

    // sum_n w_n <psi_n|H|psi_n> over the columns of Psi; Pw = Psi diag(w)
    double expect(const RowMat& Psi, const RowMat& Pw) const
    {
        cd t = 0.0;
        const int dim = static_cast<int>(diag.size());
        for (int r = 0; r < dim; ++r) {
            t += diag[r] * Psi.row(r).dot(Pw.row(r));
            for (int j = 0; j < n; ++j) t += flip(r, j) * Psi.row(r).dot(Pw.row(r ^ (1 << j)));
        }
        return t.real();
    }

    double norm_bound() const
    {
        double s = diag.cwiseAbs().maxCoeff();
        for (int j = 0; j < n; ++j) s += std::abs(x[j]) + std::abs(y[j]);
        return s;
    }
};

ChainParams derivative(const SpinChainSpec& spec, double t)
{
    const double sd = ramp_shape_rate(t, spec.tau);
    ChainParams d = spec.initial;
    for (int j = 0; j < d.size(); ++j) {
        d.h[j] = sd * (spec.final_.h[j] - spec.initial.h[j]);
        d.b[j] = sd * (spec.final_.b[j] - spec.initial.b[j]);
        d.J[j] = sd * (spec.final_.J[j] - spec.initial.J[j]);
    }
    return d;
}

std::vector<double> local_control(const SpinChainSpec& spec, double t, double theta0)
{
    std::vector<double> z = local_zeta(spec.at(t), derivative(spec, t));
    for (double& v : z) v *= theta0;
    return z;
}

Eigen::MatrixXcd delta_hamiltonian(const SpinChainSpec& spec)
{
    return chain_hamiltonian(spec.final_) - chain_hamiltonian(spec.initial);
}

Eigen::MatrixXcd exact_control(const SpinChainSpec& spec, const Eigen::MatrixXcd& dH, double t, double theta0)
{
    const double sd = ramp_shape_rate(t, spec.tau);
    if (sd == 0.0) return Eigen::MatrixXcd::Zero(dH.rows(), dH.cols());
    return theta0 * sd * exact_gauge(chain_hamiltonian(spec.at(t)), dH).A;
}

}  // namespace

Eigen::MatrixXcd chain_hamiltonian(const ChainParams& p)
{
    const PauliChain pc(p, {});
    const int dim = 1 << p.size();
    RowMat I = RowMat::Identity(dim, dim), H(dim, dim);
    pc.apply(I, H);
    return H;
}

Eigen::MatrixXcd pauli_y(int n, int j)
{
    const int dim = 1 << n;
    Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(dim, dim);
    for (int r = 0; r < dim; ++r) Y(r, r ^ (1 << j)) = ((r >> j) & 1) ? cd(0, 1) : cd(0, -1);
    return Y;
}

GaugeResult exact_gauge(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& dH, double degenerate_gap)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    const Eigen::MatrixXcd& V = es.eigenvectors();
    const Eigen::VectorXd& E = es.eigenvalues();
    Eigen::MatrixXcd D = V.adjoint() * dH * V;
    GaugeResult g;
    const int n = static_cast<int>(E.size());
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k) {
            if (m == k) continue;
            const double gap = E[k] - E[m];
            if (std::abs(gap) < degenerate_gap) {
                ++g.degenerate_pairs;
                continue;
            }
            A(m, k) = cd(0, 1) * D(m, k) / gap;
        }
    g.A = V * A * V.adjoint();
    return g;
}

VariationalResult variational_gauge(const Eigen::MatrixXcd& H, const Eigen::MatrixXcd& dH,
                                    const std::vector<Eigen::MatrixXcd>& basis)
{
    const int nb = static_cast<int>(basis.size());
    std::vector<Eigen::MatrixXcd> C(nb);
    for (int b = 0; b < nb; ++b) C[b] = cd(0, 1) * (basis[b] * H - H * basis[b]);
    Eigen::MatrixXd M(nb, nb);
    Eigen::VectorXd rhs(nb);
    for (int a = 0; a < nb; ++a) {
        rhs[a] = -(C[a] * dH).trace().real();
        for (int b = 0; b < nb; ++b) M(a, b) = (C[a] * C[b]).trace().real();
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
    cod.setThreshold(1e-12);
    VariationalResult r;
    r.coeff = cod.solve(rhs);
    r.singular = cod.rank() < nb;
    return r;
}

std::vector<double> local_zeta(const ChainParams& p, const ChainParams& dp)
{
    const int n = p.size();
    std::vector<double> z(n);
    for (int j = 0; j < n; ++j) {
        const double Jl = n > 1 ? p.J[(j + n - 1) % n] : 0.0, Jr = n > 1 ? p.J[j] : 0.0;
        const double den = p.h[j] * p.h[j] + p.b[j] * p.b[j] + Jl * Jl + Jr * Jr;
        const double num = dp.h[j] * p.b[j] - dp.b[j] * p.h[j];
        if (den < 1e-8) {
            if (num != 0.0) throw std::domain_error("local gauge denominator below 1e-8");
            z[j] = 0.0;
            continue;
        }
        z[j] = 0.5 * num / den;
    }
    return z;
}

StrokeResult run_stroke(const SpinChainSpec& spec, const Eigen::MatrixXcd& rho0, const StrokeOptions& opt)
{
    spec.validate();
    const int n = spec.initial.size();
    const bool exact = opt.control == ControlKind::exact;
    const bool local = opt.control == ControlKind::local;
    const Eigen::MatrixXcd dH = delta_hamiltonian(spec);

    auto control_y = [&](double t) {
        return local ? local_control(spec, t, opt.vartheta0) : std::vector<double>(n, 0.0);
    };

    // step from a norm bound sampled along the stroke
    double hmax = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double t = spec.tau * i / 200.0;
        double nb = PauliChain(spec.at(t), control_y(t)).norm_bound();
        if (exact) nb += exact_control(spec, dH, t, opt.vartheta0).norm();
        hmax = std::max(hmax, nb);
    }
    int steps = std::max(opt.min_steps, static_cast<int>(std::ceil(spec.tau * hmax / opt.max_phase_step)));
    steps += steps % 2;
    const double dt = spec.tau / steps;

    // rho0 = sum_n w_n |psi_n><psi_n|; states with negligible weight are dropped
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho0 + rho0.adjoint()));
    std::vector<int> keep;
    const double wmax = es.eigenvalues().maxCoeff();
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()[i] > 1e-14 * wmax) keep.push_back(i);
    const int dim = static_cast<int>(rho0.rows()), k = static_cast<int>(keep.size());
    RowMat psi(dim, k);
    Eigen::VectorXd w(k);
    for (int c = 0; c < k; ++c) {
        psi.col(c) = es.eigenvectors().col(keep[c]);
        w[c] = es.eigenvalues()[keep[c]];
    }

    auto rhs = [&](double t, const RowMat& x, RowMat& out) {
        if (exact) {
            const Eigen::MatrixXcd Ht = chain_hamiltonian(spec.at(t)) + exact_control(spec, dH, t, opt.vartheta0);
            out.noalias() = Ht * x;
        } else {
            PauliChain(spec.at(t), control_y(t)).apply(x, out);
        }
        out *= cd(0, -1);
    };

    ChainParams delta = spec.initial;
    for (int j = 0; j < n; ++j) {
        delta.h[j] = spec.final_.h[j] - spec.initial.h[j];
        delta.b[j] = spec.final_.b[j] - spec.initial.b[j];
        delta.J[j] = spec.final_.J[j] - spec.initial.J[j];
    }
    const PauliChain dchain(delta, {});
    ChainParams zero = spec.initial;
    for (int j = 0; j < n; ++j) zero.h[j] = zero.b[j] = zero.J[j] = 0.0;

    const double fd = 1e-6 * spec.tau;
    RowMat pw(dim, k);
    std::function<void(double, const RowMat&, double&, double&)> sample = [&](double t, const RowMat& x, double& p0,
                                                                            double& pcd) {
        pw = x * w.cast<cd>().asDiagonal();
        p0 = ramp_shape_rate(t, spec.tau) * dchain.expect(x, pw);
        pcd = 0.0;
        if (local) {
            const auto zp = control_y(t + fd), zm = control_y(t - fd);
            std::vector<double> dz(n);
            for (int j = 0; j < n; ++j) dz[j] = (zp[j] - zm[j]) / (2.0 * fd);
            pcd = PauliChain(zero, dz).expect(x, pw);
        } else if (exact) {
            const Eigen::MatrixXcd dHcd = (exact_control(spec, dH, t + fd, opt.vartheta0)
                                           - exact_control(spec, dH, t - fd, opt.vartheta0)) / (2.0 * fd);
            pcd = (Eigen::MatrixXcd(pw).adjoint() * dHcd * Eigen::MatrixXcd(x)).trace().real();
        }
    };

    StrokeResult res;
    res.steps = steps;
    if (!opt.record_work) sample = [](double, const RowMat&, double& p0, double& pcd) { p0 = pcd = 0.0; };
    RowMat k1(dim, k), k2(dim, k), k3(dim, k), k4(dim, k), tmp(dim, k);
    std::vector<double> f0(steps + 1), fcd(steps + 1);
    sample(0.0, psi, f0[0], fcd[0]);
    for (int s = 0; s < steps; ++s) {
        const double t = s * dt;
        rhs(t, psi, k1);
        tmp = psi + 0.5 * dt * k1;
        rhs(t + 0.5 * dt, tmp, k2);
        tmp = psi + 0.5 * dt * k2;
        rhs(t + 0.5 * dt, tmp, k3);
        tmp = psi + dt * k3;
        rhs(t + dt, tmp, k4);
        psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        sample(t + dt, psi, f0[s + 1], fcd[s + 1]);
    }
    auto simpson = [&](const std::vector<double>& f) {
        double acc = f.front() + f.back();
        for (int i = 1; i < steps; ++i) acc += (i % 2 ? 4.0 : 2.0) * f[i];
        return acc * dt / 3.0;
    };
    res.w0 = simpson(f0);
    res.wcd = simpson(fcd);
    for (double v : fcd) res.max_cd_power = std::max(res.max_cd_power, std::abs(v));
    const Eigen::MatrixXcd P = psi;
    res.rho = P * w.cast<cd>().asDiagonal() * P.adjoint();
    res.rho = 0.5 * (res.rho + res.rho.adjoint()).eval();
    return res;
}

Eigen::MatrixXcd gibbs_state(const Eigen::MatrixXcd& H, double temperature)
{
    if (!(temperature > 0.0)) throw std::invalid_argument("temperature must be positive");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    const Eigen::VectorXd& E = es.eigenvalues();
    Eigen::VectorXd w = (-(E.array() - E.minCoeff()) / temperature).exp();
    w /= w.sum();
    return es.eigenvectors() * w.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
}

Eigen::MatrixXcd adiabatic_target(const Eigen::MatrixXcd& rho0, const Eigen::MatrixXcd& H_from,
                                  const Eigen::MatrixXcd& H_to)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> from(H_from), to(H_to);
    const Eigen::MatrixXcd& V = from.eigenvectors();
    Eigen::VectorXd p = (V.adjoint() * rho0 * V).diagonal().real();
    const Eigen::MatrixXcd& W = to.eigenvectors();
    return W * p.cast<cd>().asDiagonal() * W.adjoint();
}

double fidelity(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& sigma)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
    const Eigen::VectorXd sq = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXcd r = es.eigenvectors() * sq.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
    Eigen::MatrixXcd M = r * sigma * r;
    M = 0.5 * (M + M.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> em(M, Eigen::EigenvaluesOnly);
    return em.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
}

double hybrid_efficiency(double w0, double wcd, double q_hot)
{
    const double denom = wcd <= 0.0 ? q_hot : q_hot + wcd;
    if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return -w0 / denom;
}

namespace {

struct Spectrum {
    Eigen::MatrixXcd V;
    Eigen::VectorXd E;
    explicit Spectrum(const Eigen::MatrixXcd& H)
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
        V = es.eigenvectors();
        E = es.eigenvalues();
    }
    Eigen::VectorXd gibbs(double T) const
    {
        Eigen::VectorXd w = (-(E.array() - E.minCoeff()) / T).exp();
        return w / w.sum();
    }
    Eigen::MatrixXcd with(const Eigen::VectorXd& p) const { return V * p.cast<cd>().asDiagonal() * V.adjoint(); }
};

// fidelity against sigma = V diag(p) V^dagger without re-diagonalizing sigma
double fidelity_known(const Spectrum& s, const Eigen::VectorXd& p, const Eigen::MatrixXcd& rho)
{
    const Eigen::MatrixXcd r = s.with(p.cwiseMax(0.0).cwiseSqrt());
    Eigen::MatrixXcd M = r * rho * r;
    M = 0.5 * (M + M.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> em(M, Eigen::EigenvaluesOnly);
    return em.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
}

}  // namespace

StaOutcome run_sta_otto(const StaCycleSpec& spec, const StrokeOptions& opt)
{
    const SpinChainSpec& up = spec.chain;
    up.validate();
    const SpinChainSpec down{up.final_, up.initial, up.tau};
    const Eigen::MatrixXcd Hi = chain_hamiltonian(up.initial), Hf = chain_hamiltonian(up.final_);
    const Spectrum si(Hi), sf(Hf);
    auto energy = [](const Eigen::MatrixXcd& r, const Eigen::MatrixXcd& H) { return (r * H).trace().real(); };

    const Eigen::VectorXd pA = si.gibbs(spec.T_c), pC = sf.gibbs(spec.T_h);
    const Eigen::MatrixXcd A = si.with(pA), C = sf.with(pC);
    const StrokeResult s1 = run_stroke(up, A, opt);
    const StrokeResult s3 = run_stroke(down, C, opt);

    const double EA = energy(A, Hi), EB = energy(s1.rho, Hf), EC = energy(C, Hf), ED = energy(s3.rho, Hi);
    StaOutcome out;
    out.split = {s1.w0 + s3.w0, s1.wcd + s3.wcd};
    const double tau_cyc = 2.0 * up.tau + spec.tau2 + spec.tau4;
    out.cycle = make_outcome((EB - EA) + (ED - EC), EC - EB, EA - ED, tau_cyc);
    out.cycle.power = out.split.w0 / tau_cyc;
    out.cycle.efficiency = hybrid_efficiency(out.split.w0, out.split.wcd, out.cycle.heat_hot);
    out.fidelity_ab = fidelity_known(sf, pA, s1.rho);
    out.fidelity_cd = fidelity_known(si, pC, s3.rho);
    out.vartheta0 = opt.control == ControlKind::none ? 0.0 : opt.vartheta0;
    return out;
}

double optimize_vartheta0(const StaCycleSpec& spec, StrokeOptions opt, double tol)
{
    opt.control = ControlKind::local;
    const Spectrum si(chain_hamiltonian(spec.chain.initial)), sf(chain_hamiltonian(spec.chain.final_));
    const Eigen::VectorXd pA = si.gibbs(spec.T_c);
    const Eigen::MatrixXcd A = si.with(pA);
    opt.record_work = false;
    auto f = [&](double th) {
        StrokeOptions o = opt;
        o.vartheta0 = th;
        return fidelity_known(sf, pA, run_stroke(spec.chain, A, o).rho);
    };
    double best = golden_max(f, 0.0, 1.0, tol);
    double fb = f(best);
    for (double edge : {0.0, 1.0}) {
        const double fe = f(edge);
        if (fe > fb) {
            fb = fe;
            best = edge;
        }
    }
    return best;
}

}  // namespace qtm
