#include "qtm/collective_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

namespace qtm {

BathSpec BathSpec::flat(double beta, double gamma, std::string label)
{
    if (gamma < 0.0) throw std::invalid_argument("negative bath rate");
    BathSpec b;
    b.beta = beta;
    b.emission = [gamma](double) { return gamma; };
    b.label = std::move(label);
    return b;
}

double BathSpec::rate(double nu) const
{
    if (nu >= 0.0) return emission(nu);
    return emission(-nu) * std::exp(beta * nu);
}

double BlockPopulations::mean_m() const
{
    double s = 0.0;
    for (int a = 0; a < p.size(); ++a) s += (j - a) * p[a];
    return s;
}

double EnsembleState::energy(double omega) const
{
    double e = 0.0;
    for (const auto& b : blocks) e += omega * b.mean_m();
    return e;
}

double EnsembleState::total_weight() const
{
    double w = 0.0;
    for (const auto& b : blocks) w += b.weight();
    return w;
}

Eigen::MatrixXd birth_death_generator(double j, double down, double up)
{
    const int dim = twice(j) + 1;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(dim, dim);
    for (int a = 0; a < dim; ++a) {
        const double m = j - a;
        K(a, a) = -down * lowering_weight(j, m) - up * raising_weight(j, m);
        if (a > 0) K(a, a - 1) = down * raising_weight(j, m);      // from m+1
        if (a + 1 < dim) K(a, a + 1) = up * lowering_weight(j, m);  // from m-1
    }
    return K;
}

double stable_step(double j, double down, double up)
{
    const double g = std::max(down, up);
    const double scale = g * std::max(j * j, j * (j + 1.0));
    if (scale <= 0.0) return std::numeric_limits<double>::infinity();
    return 0.5 / scale;
}

namespace {

// tridiagonal action of the birth-death generator
struct Tridiag {
    Eigen::VectorXd diag, lower, upper;  // lower(a) couples a <- a-1, upper(a) couples a <- a+1

    Tridiag(double j, double down, double up)
    {
        const int dim = twice(j) + 1;
        diag.resize(dim);
        lower = Eigen::VectorXd::Zero(dim);
        upper = Eigen::VectorXd::Zero(dim);
        for (int a = 0; a < dim; ++a) {
            const double m = j - a;
            diag[a] = -down * lowering_weight(j, m) - up * raising_weight(j, m);
            if (a > 0) lower[a] = down * raising_weight(j, m);
            if (a + 1 < dim) upper[a] = up * lowering_weight(j, m);
        }
    }

    void apply(const Eigen::VectorXd& p, Eigen::VectorXd& out) const
    {
        const int n = static_cast<int>(p.size());
        for (int a = 0; a < n; ++a) {
            double s = diag[a] * p[a];
            if (a > 0) s += lower[a] * p[a - 1];
            if (a + 1 < n) s += upper[a] * p[a + 1];
            out[a] = s;
        }
    }
};

}  // namespace

BlockPopulations evolve_block_rates(const BlockPopulations& pops, double down, double up,
                                    double dt, double t_total)
{
    if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
    if (t_total < 0.0) throw std::invalid_argument("t_total must be nonnegative");
    if (dt >= stable_step(pops.j, down, up))
        throw std::domain_error("step size violates the stability bound dt*G*j^2 < 1/2");

    const Tridiag K(pops.j, down, up);
    BlockPopulations out = pops;
    Eigen::VectorXd& p = out.p;
    const int n = static_cast<int>(p.size());
    Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), tmp(n);
    const long steps = static_cast<long>(std::ceil(t_total / dt - 1e-12));
    for (long s = 0; s < steps; ++s) {
        const double h = std::min(dt, t_total - s * dt);
        if (h <= 0.0) break;
        K.apply(p, k1);
        tmp = p + 0.5 * h * k1;
        K.apply(tmp, k2);
        tmp = p + 0.5 * h * k2;
        K.apply(tmp, k3);
        tmp = p + h * k3;
        K.apply(tmp, k4);
        p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return out;
}

BlockPopulations evolve_block(const BlockPopulations& pops, const BathSpec& bath, double omega,
                              double dt, double t_total)
{
    return evolve_block_rates(pops, bath.rate(omega), bath.rate(-omega), dt, t_total);
}

EnsembleState evolve_ensemble(const EnsembleState& s, const BathSpec& bath, double omega, double dt,
                              double t_total)
{
    EnsembleState out = s;
    const int nb = static_cast<int>(s.blocks.size());
    const double down = bath.rate(omega), up = bath.rate(-omega);
#pragma omp parallel for schedule(dynamic)
    for (int b = 0; b < nb; ++b) out.blocks[b] = evolve_block_rates(s.blocks[b], down, up, dt, t_total);
    return out;
}

EnsembleState evolve_ensemble_serial(const EnsembleState& s, const BathSpec& bath, double omega,
                                     double dt, double t_total)
{
    EnsembleState out = s;
    for (auto& b : out.blocks) b = evolve_block(b, bath, omega, dt, t_total);
    return out;
}

BlockPopulations block_gibbs(double j, double beta, double omega, double weight)
{
    if (!std::isfinite(beta)) throw std::invalid_argument("beta must be finite");
    const int dim = twice(j) + 1;
    Eigen::VectorXd logw(dim);
    for (int a = 0; a < dim; ++a) logw[a] = -(j - a) * omega * beta;
    const double mx = logw.maxCoeff();
    Eigen::VectorXd w = (logw.array() - mx).exp();
    BlockPopulations b;
    b.j = j;
    b.p = weight * w / w.sum();
    return b;
}

double block_gibbs_energy(double j, double beta, double omega)
{
    return omega * block_gibbs(j, beta, omega).mean_m();
}

Eigen::VectorXd independent_gibbs(const SpinEnsembleSpec& spec, double beta)
{
    spec.validate();
    return block_gibbs(spec.spin_s, beta, spec.omega).p;
}

namespace {

// 1/sinh^2(y) without overflow
double inv_sinh2(double y)
{
    const double e = std::exp(-2.0 * std::abs(y));
    const double d = 1.0 - e;
    return 4.0 * e / (d * d);
}

}  // namespace

double collective_heat_capacity(double j, double beta, double omega)
{
    const double x = omega * beta;
    const double b = j + 0.5;
    if (std::abs(x) * b < 1e-2) {
        const double x2 = x * x, b2 = b * b;
        const double var = j * (j + 1.0) / 3.0 - x2 * (b2 * b2 / 15.0 - 1.0 / 240.0)
                           + x2 * x2 * (2.0 * b2 * b2 * b2 / 189.0 - 1.0 / 6048.0);
        return x2 * var;
    }
    const double var = 0.25 * inv_sinh2(0.5 * x) - b * b * inv_sinh2(b * x);
    return x * x * var;
}

double independent_heat_capacity(const SpinEnsembleSpec& spec, double beta)
{
    spec.validate();
    return spec.n_spins * collective_heat_capacity(spec.spin_s, beta, spec.omega);
}

double critical_temperature(const SpinEnsembleSpec& spec)
{
    spec.validate();
    const double N = spec.n_spins, s = spec.spin_s;
    return std::abs(spec.omega) * std::sqrt((4.0 * N * s * (s + 1.0) + 1.0) / 12.0);
}

double crossover_temperature_numeric(const SpinEnsembleSpec& spec)
{
    spec.validate();
    if (spec.n_spins < 2) throw std::domain_error("no crossover for a single spin");
    const double jmax = spec.max_j();
    auto f = [&](double T) {
        const double beta = 1.0 / T;
        return collective_heat_capacity(jmax, beta, spec.omega)
               - spec.n_spins * collective_heat_capacity(spec.spin_s, beta, spec.omega);
    };
    const double w = std::abs(spec.omega);
    double lo = 0.02 * w, hi = 50.0 * w * std::sqrt(spec.n_spins);
    if (f(lo) >= 0.0 || f(hi) <= 0.0) throw std::domain_error("crossover not bracketed");
    for (int it = 0; it < 200 && hi / lo > 1.0 + 1e-13; ++it) {
        const double mid = std::sqrt(lo * hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return std::sqrt(lo * hi);
}

double relative_entropy(const Eigen::VectorXd& p, const Eigen::VectorXd& q)
{
    const double ps = p.sum(), qs = q.sum();
    double d = 0.0;
    for (int a = 0; a < p.size(); ++a) {
        const double pa = p[a] / ps, qa = q[a] / qs;
        if (pa > 0.0) d += pa * std::log(pa / qa);
    }
    return d;
}

EnsembleState ensemble_gibbs(const SpinEnsembleSpec& spec, const std::vector<double>& block_weights,
                             double beta0)
{
    const auto blocks = block_decomposition(spec);
    if (block_weights.size() != blocks.size())
        throw std::invalid_argument("one weight per Dicke block required");
    double total = 0.0;
    for (double w : block_weights) {
        if (w < 0.0) throw std::invalid_argument("negative block weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("block weights must sum to 1");
    EnsembleState s;
    for (size_t b = 0; b < blocks.size(); ++b) {
        if (block_weights[b] == 0.0) continue;
        s.blocks.push_back(block_gibbs(blocks[b].j, beta0, spec.omega, block_weights[b]));
        s.degeneracy.push_back(blocks[b].degeneracy);
    }
    return s;
}

EnsembleState symmetric_gibbs(const SpinEnsembleSpec& spec, double beta0)
{
    const auto blocks = block_decomposition(spec);
    std::vector<double> w(blocks.size(), 0.0);
    w.back() = 1.0;
    return ensemble_gibbs(spec, w, beta0);
}

double equilibration_time(double j, double beta0, const BathSpec& bath, double omega)
{
    const double down = bath.rate(omega), up = bath.rate(-omega);
    const double e_ss = block_gibbs_energy(j, bath.beta, omega);
    BlockPopulations p = block_gibbs(j, beta0, omega);
    double gap = omega * p.mean_m() - e_ss;
    const double target = std::abs(gap) / std::exp(1.0);
    if (std::abs(gap) == 0.0) return 0.0;
    const double dt = 0.02 * stable_step(j, down, up);
    double t = 0.0;
    for (long it = 0; it < 100000000L; ++it) {
        BlockPopulations q = evolve_block_rates(p, down, up, dt, dt);
        const double g = std::abs(omega * q.mean_m() - e_ss);
        if (g <= target) {
            const double g0 = std::abs(gap);
            return t + dt * (g0 - target) / (g0 - g);
        }
        gap = omega * q.mean_m() - e_ss;
        p = std::move(q);
        t += dt;
    }
    throw std::runtime_error("equilibration did not reach 1/e");
}

namespace {

struct RegisterOps {
    Eigen::MatrixXcd Jz, Jminus;
};

RegisterOps register_ops(int n)
{
    if (n < 1 || n > 6) throw std::invalid_argument("dense reference limited to 1..6 spins");
    const int d = 1 << n;
    RegisterOps ops{Eigen::MatrixXcd::Zero(d, d), Eigen::MatrixXcd::Zero(d, d)};
    for (int x = 0; x < d; ++x) {
        // bit set = spin up
        ops.Jz(x, x) = 0.5 * (2 * __builtin_popcount(unsigned(x)) - n);
        for (int i = 0; i < n; ++i)
            if (x & (1 << i)) ops.Jminus(x ^ (1 << i), x) = 1.0;
    }
    return ops;
}

Eigen::MatrixXcd dissipator(const Eigen::MatrixXcd& A)
{
    const Eigen::Index d = A.rows();
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(d, d);
    const Eigen::MatrixXcd AdA = A.adjoint() * A;
    return Eigen::kroneckerProduct(A.conjugate(), A) - 0.5 * Eigen::kroneckerProduct(I, AdA) -
           0.5 * Eigen::kroneckerProduct(AdA.transpose(), I);
}

}  // namespace

Eigen::MatrixXcd dicke_liouvillian(int n, double omega, double down, double up)
{
    const RegisterOps ops = register_ops(n);
    const Eigen::Index d = ops.Jz.rows();
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(d, d);
    const Eigen::MatrixXcd H = omega * ops.Jz;
    const std::complex<double> mi(0.0, -1.0);
    Eigen::MatrixXcd L = mi * (Eigen::kroneckerProduct(I, H) - Eigen::kroneckerProduct(H.transpose(), I));
    L += down * dissipator(ops.Jminus);
    L += up * dissipator(ops.Jminus.adjoint());
    return L;
}

std::vector<BlockPopulations> coupled_populations(const Eigen::MatrixXcd& rho, int n)
{
    const RegisterOps ops = register_ops(n);
    const Eigen::Index d = ops.Jz.rows();
    if (rho.rows() != d || rho.cols() != d) throw std::invalid_argument("coupled_populations: size mismatch");
    const Eigen::MatrixXcd Jp = ops.Jminus.adjoint();
    const Eigen::MatrixXd J2 = (Jp * ops.Jminus + ops.Jz * ops.Jz - ops.Jz).real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J2);
    std::vector<BlockPopulations> out;
    for (int tj = n; tj >= 0; tj -= 2) {
        const double j = 0.5 * tj;
        BlockPopulations b;
        b.j = j;
        b.p = Eigen::VectorXd::Zero(tj + 1);
        for (Eigen::Index k = 0; k < d; ++k) {
            if (std::abs(es.eigenvalues()[k] - j * (j + 1.0)) > 1e-6) continue;
            const Eigen::VectorXcd v = es.eigenvectors().col(k).cast<std::complex<double>>();
            // P(j, m) = sum over the j-eigenspace restricted to the m sector
            for (Eigen::Index x = 0; x < d; ++x)
                for (Eigen::Index y = 0; y < d; ++y) {
                    if (ops.Jz(x, x) != ops.Jz(y, y) || v[x] == 0.0 || v[y] == 0.0) continue;
                    const int a = int(std::lround(j - ops.Jz(x, x).real()));
                    if (a < 0 || a > tj) continue;
                    b.p[a] += (std::conj(v[x]) * rho(x, y) * v[y]).real();
                }
        }
        out.push_back(b);
    }
    return out;
}

}  // namespace qtm
