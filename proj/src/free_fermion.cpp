#include "qtm/free_fermion.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>

namespace qtm {

namespace ode = boost::numeric::odeint;
using cd = std::complex<double>;

void TfimSpec::validate() const
{
    if (n_sites < 2 || n_sites % 2 != 0) throw std::invalid_argument("n_sites must be even and positive");
    if (!std::isfinite(J)) throw std::invalid_argument("J must be finite");
}

std::vector<double> TfimSpec::momenta() const
{
    validate();
    std::vector<double> k(n_sites / 2);
    for (int m = 1; m <= n_sites / 2; ++m) k[m - 1] = (2 * m - 1) * std::numbers::pi / n_sites;
    return k;
}

LinearRamp kz_ramp(double h_start, double h_end, double tau)
{
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
    return {h_start, h_end, std::abs(h_end - h_start) * tau};
}

double mode_energy(double k, double h, double J)
{
    const double a = h + J * std::cos(k), b = J * std::sin(k);
    return 2.0 * std::sqrt(a * a + b * b);
}

std::vector<double> spectrum(const TfimSpec& spec, double h)
{
    std::vector<double> e;
    for (double k : spec.momenta()) e.push_back(mode_energy(k, h, spec.J));
    return e;
}

double spectral_gap(const TfimSpec& spec, double h)
{
    double g = std::numeric_limits<double>::infinity();
    for (double e : spectrum(spec, h)) g = std::min(g, e);
    return g;
}

double ground_energy(const TfimSpec& spec, double h)
{
    double e = 0.0;
    for (double x : spectrum(spec, h)) e -= x;
    return e;
}

Eigen::Matrix2d pair_hamiltonian(double k, double h, double J)
{
    const double a = h + J * std::cos(k), b = J * std::sin(k);
    Eigen::Matrix2d H;
    H << 0.0, 2.0 * b, 2.0 * b, -4.0 * a;
    return H;
}

Eigen::Matrix4cd pair_hamiltonian4(double k, double h, double J)
{
    Eigen::Matrix4cd H = Eigen::Matrix4cd::Zero();
    H.topLeftCorner<2, 2>() = pair_hamiltonian(k, h, J).cast<cd>();
    H(2, 2) = H(3, 3) = -2.0 * (h + J * std::cos(k));
    return H;
}

Eigen::Matrix2d pair_eigenvectors(double k, double h, double J)
{
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es;
    es.computeDirect(pair_hamiltonian(k, h, J));
    return es.eigenvectors();
}

ModeEnsembleState ground_state(const TfimSpec& spec, double h)
{
    ModeEnsembleState s;
    s.k = spec.momenta();
    for (double k : s.k) s.amp.push_back(pair_eigenvectors(k, h, spec.J).col(0).cast<cd>());
    return s;
}

ModeEnsembleState to_density(const ModeEnsembleState& s)
{
    if (s.open()) return s;
    ModeEnsembleState out;
    out.k = s.k;
    for (const auto& a : s.amp) {
        Eigen::Matrix4cd r = Eigen::Matrix4cd::Zero();
        r.topLeftCorner<2, 2>() = a * a.adjoint();
        out.rho.push_back(r);
    }
    return out;
}

namespace {

using Amp = std::array<double, 4>;
using Rho = std::array<double, 32>;


Eigen::Vector2cd integrate_pair(double k, double J, const LinearRamp& ramp, const Eigen::Vector2cd& psi0,
                                OdeTolerance tol)
{
    Amp x{psi0[0].real(), psi0[0].imag(), psi0[1].real(), psi0[1].imag()};
    auto rhs = [&](const Amp& y, Amp& dy, double t) {
        const Eigen::Matrix2d H = pair_hamiltonian(k, ramp.h(t), J);
        const cd u(y[0], y[1]), v(y[2], y[3]);
        const cd du = -cd(0, 1) * (H(0, 0) * u + H(0, 1) * v);
        const cd dv = -cd(0, 1) * (H(1, 0) * u + H(1, 1) * v);
        dy = {du.real(), du.imag(), dv.real(), dv.imag()};
    };
    if (ramp.duration > 0.0)
        ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<Amp>>(tol.abs, tol.rel), rhs, x, 0.0,
                                ramp.duration, std::min(1e-3, ramp.duration));
    return Eigen::Vector2cd(cd(x[0], x[1]), cd(x[2], x[3]));
}

std::vector<Eigen::Matrix4cd> jump_operators(LindbladKind kind)
{
    Eigen::Matrix4cd a = Eigen::Matrix4cd::Zero(), b = Eigen::Matrix4cd::Zero();
    switch (kind) {
    case LindbladKind::create:
    case LindbladKind::annihilate:
        // c_k^+ : |0> -> |k>, |-k> -> |k,-k>;  c_-k^+ : |0> -> |-k>, |k> -> -|k,-k>
        a(2, 0) = 1.0;
        a(1, 3) = 1.0;
        b(3, 0) = 1.0;
        b(1, 2) = -1.0;
        if (kind == LindbladKind::annihilate) {
            a.adjointInPlace();
            b.adjointInPlace();
        }
        break;
    case LindbladKind::dephase:
        a.diagonal() << 0.0, 1.0, 1.0, 0.0;
        b.diagonal() << 0.0, 1.0, 0.0, 1.0;
        break;
    }
    return {a, b};
}

Eigen::Matrix4cd integrate_pair_open(double k, double J, const LinearRamp& ramp, const Eigen::Matrix4cd& rho0,
                                     const DissipationSpec& diss, OdeTolerance tol)
{
    const auto Ls = jump_operators(diss.kind);
    Eigen::Matrix4cd LdL = Eigen::Matrix4cd::Zero();
    for (const auto& L : Ls) LdL += L.adjoint() * L;
    Rho x;
    Eigen::Map<Eigen::Matrix4cd>(reinterpret_cast<cd*>(x.data())) = rho0;
    auto rhs = [&](const Rho& y, Rho& dy, double t) {
        const Eigen::Map<const Eigen::Matrix4cd> r(reinterpret_cast<const cd*>(y.data()));
        Eigen::Map<Eigen::Matrix4cd> d(reinterpret_cast<cd*>(dy.data()));
        const Eigen::Matrix4cd H = pair_hamiltonian4(k, ramp.h(t), J);
        d = -cd(0, 1) * (H * r - r * H);
        if (diss.kappa > 0.0) {
            Eigen::Matrix4cd D = -0.5 * (LdL * r + r * LdL);
            for (const auto& L : Ls) D += L * r * L.adjoint();
            d += diss.kappa * D;
        }
    };
    if (ramp.duration > 0.0)
        ode::integrate_adaptive(ode::make_controlled<ode::runge_kutta_dopri5<Rho>>(tol.abs, tol.rel), rhs, x, 0.0,
                                ramp.duration, std::min(1e-3, ramp.duration));
    Eigen::Matrix4cd out = Eigen::Map<Eigen::Matrix4cd>(reinterpret_cast<cd*>(x.data()));
    return 0.5 * (out + out.adjoint());
}

}  // namespace

ModeEnsembleState evolve_closed(const TfimSpec& spec, const ModeEnsembleState& s, const LinearRamp& ramp,
                                OdeTolerance tol, Exec exec)
{
    if (s.open()) throw std::invalid_argument("evolve_closed needs amplitudes");
    ModeEnsembleState out = s;
    parallel_for(s.k.size(), exec, [&](std::size_t i) { out.amp[i] = integrate_pair(s.k[i], spec.J, ramp, s.amp[i], tol); });
    return out;
}

ModeEnsembleState evolve_open(const TfimSpec& spec, const ModeEnsembleState& s, const LinearRamp& ramp,
                              const DissipationSpec& diss, OdeTolerance tol, Exec exec)
{
    if (diss.kappa < 0.0) throw std::invalid_argument("kappa must be nonnegative");
    ModeEnsembleState out = to_density(s);
    parallel_for(out.k.size(), exec, [&](std::size_t i) {
        out.rho[i] = integrate_pair_open(out.k[i], spec.J, ramp, out.rho[i], diss, tol);
    });
    for (std::size_t i = 0; i < out.k.size(); ++i) {
        const double lo = Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd>(out.rho[i]).eigenvalues().minCoeff();
        if (lo < -1e-10) {
            std::ostringstream msg;
            msg << "positivity violated on mode k=" << out.k[i] << ": min eigenvalue " << lo;
            throw std::runtime_error(msg.str());
        }
    }
    return out;
}

std::vector<double> excitation_probabilities(const TfimSpec& spec, const ModeEnsembleState& s, double h)
{
    std::vector<double> p(s.k.size());
    for (std::size_t i = 0; i < s.k.size(); ++i) {
        const Eigen::Vector2cd e = pair_eigenvectors(s.k[i], h, spec.J).col(1).cast<cd>();
        if (s.open()) {
            const auto& r = s.rho[i];
            const double pe = std::real(e.dot(r.topLeftCorner<2, 2>() * e));
            p[i] = pe + 0.5 * std::real(r(2, 2) + r(3, 3));
        } else {
            p[i] = std::norm(e.dot(s.amp[i]));
        }
    }
    return p;
}

double excitation_energy(const TfimSpec& spec, const ModeEnsembleState& s, double h)
{
    const std::vector<double> p = excitation_probabilities(spec, s, h);
    double e = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) e += 2.0 * mode_energy(s.k[i], h, spec.J) * p[i];
    return e;
}

double defect_density(const TfimSpec& spec, const ModeEnsembleState& s, double h)
{
    const std::vector<double> p = excitation_probabilities(spec, s, h);
    double n = 0.0;
    for (double x : p) n += 2.0 * x;
    return n / spec.n_sites;
}

double magnetization(const ModeEnsembleState& s)
{
    double n = 0.0;
    for (std::size_t i = 0; i < s.k.size(); ++i) {
        if (s.open()) {
            const auto& r = s.rho[i];
            n += std::real(2.0 * r(1, 1) + r(2, 2) + r(3, 3));
        } else {
            n += 2.0 * std::norm(s.amp[i][1]);
        }
    }
    return 2.0 * n - 2.0 * static_cast<double>(s.k.size());
}

double sudden_quench_energy(const TfimSpec& spec, double h_i, double h_f)
{
    return excitation_energy(spec, ground_state(spec, h_i), h_f);
}

namespace {

// exp(-i (alpha I + v . sigma)) for real alpha, v
Eigen::Matrix2cd su2_exp(double alpha, double vx, double vy, double vz)
{
    const double n = std::sqrt(vx * vx + vy * vy + vz * vz);
    const double c = std::cos(n), s = n > 0.0 ? std::sin(n) / n : 1.0;
    const cd i(0, 1);
    Eigen::Matrix2cd U;
    U << c - i * s * vz, -i * s * (vx - i * vy), -i * s * (vx + i * vy), c + i * s * vz;
    return std::exp(-i * alpha) * U;
}

double magnus_transition(double k, double J, const LinearRamp& ramp, double max_phase, double max_dt)
{
    const Eigen::Vector2d g = pair_eigenvectors(k, ramp.h_start, J).col(0);
    Eigen::Vector2cd psi = g.cast<cd>();
    const double a_rate = ramp.rate();  // dH/dt = diag(0, -4 a_rate)
    double t = 0.0;
    while (t < ramp.duration) {
        const double eps = mode_energy(k, ramp.h(t), J);
        double dt = std::min(max_dt, max_phase / std::max(eps, 1e-12));
        dt = std::min(dt, ramp.duration - t);
        const double hm = ramp.h(t + 0.5 * dt);
        const double a = hm + J * std::cos(k), b = J * std::sin(k);
        // H_m = -2a I + 2b sx + 2a sz ; B = -2 r I + 2 r sz ; Omega = -i dt H_m + dt^3/12 [H_m, B]
        // [2b sx, 2 r sz] = -8 i b r sy  ->  dt^3/12 * (-8 i b r) sy = -i (2/3) b r dt^3 sy
        const double vy = (2.0 / 3.0) * b * a_rate * dt * dt * dt;
        psi = su2_exp(-2.0 * a * dt, 2.0 * b * dt, vy, 2.0 * a * dt) * psi;
        t += dt;
    }
    const Eigen::Vector2cd e = pair_eigenvectors(k, ramp.h_end, J).col(1).cast<cd>();
    return std::norm(e.dot(psi));
}

}  // namespace

std::vector<double> ramp_transition_probabilities(const TfimSpec& spec, const LinearRamp& ramp, double max_phase,
                                                  double max_dt, Exec exec)
{
    const std::vector<double> ks = spec.momenta();
    std::vector<double> P(ks.size());
    parallel_for(ks.size(), exec,
              [&](std::size_t i) { P[i] = magnus_transition(ks[i], spec.J, ramp, max_phase, max_dt); });
    return P;
}

}  // namespace qtm
