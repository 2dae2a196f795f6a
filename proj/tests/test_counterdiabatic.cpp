#include <doctest.h>

#include <random>

#include "qtm/counterdiabatic.hpp"

using namespace qtm;
using cd = std::complex<double>;

namespace {

Eigen::MatrixXcd random_hermitian(int d, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    Eigen::MatrixXcd A(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) A(i, j) = {g(rng), g(rng)};
    return 0.5 * (A + A.adjoint());
}

ChainParams random_params(int n, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ChainParams p{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    for (int j = 0; j < n; ++j) {
        p.h[j] = u(rng);
        p.b[j] = u(rng);
        p.J[j] = 0.5 * u(rng);
    }
    return p;
}

// all 4^n Pauli strings
std::vector<Eigen::MatrixXcd> pauli_strings(int n)
{
    Eigen::Matrix2cd s[4];
    s[0] = Eigen::Matrix2cd::Identity();
    s[1] << 0, 1, 1, 0;
    s[2] << 0, cd(0, -1), cd(0, 1), 0;
    s[3] << 1, 0, 0, -1;
    std::vector<Eigen::MatrixXcd> out;
    for (int code = 0; code < (1 << (2 * n)); ++code) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
        for (int j = n - 1; j >= 0; --j) {
            const Eigen::Matrix2cd& f = s[(code >> (2 * j)) & 3];
            Eigen::MatrixXcd k(m.rows() * 2, m.cols() * 2);
            for (int a = 0; a < m.rows(); ++a)
                for (int b = 0; b < m.cols(); ++b) k.block(2 * a, 2 * b, 2, 2) = m(a, b) * f;
            m = k;
        }
        out.push_back(m);
    }
    return out;
}

Eigen::MatrixXcd combine(const std::vector<Eigen::MatrixXcd>& basis, const Eigen::VectorXd& c)
{
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(basis[0].rows(), basis[0].cols());
    for (std::size_t b = 0; b < basis.size(); ++b) A += c[b] * basis[b];
    return A;
}

}  // namespace

TEST_CASE("ramp shape endpoints and derivative")
{
    const double tau = 0.7;
    CHECK(ramp_shape(0.0, tau) == doctest::Approx(0.0));
    CHECK(ramp_shape(tau, tau) == doctest::Approx(1.0));
    CHECK(ramp_shape_rate(0.0, tau) == doctest::Approx(0.0));
    CHECK(ramp_shape_rate(tau, tau) == doctest::Approx(0.0).epsilon(1e-12));
    for (double t : {0.1, 0.3, 0.55}) {
        const double h = 1e-6;
        const double fd = (ramp_shape(t + h, tau) - ramp_shape(t - h, tau)) / (2 * h);
        CHECK(ramp_shape_rate(t, tau) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("chain Hamiltonian conventions")
{
    const ChainParams p{{0.3}, {0.7}, {0.0}};
    const Eigen::MatrixXcd H = chain_hamiltonian(p);
    CHECK(H(0, 0).real() == doctest::Approx(-0.7));
    CHECK(H(1, 1).real() == doctest::Approx(0.7));
    CHECK(H(0, 1).real() == doctest::Approx(-0.3));
    const Eigen::MatrixXcd Y = pauli_y(1, 0);
    CHECK(Y(0, 1) == cd(0, -1));
    CHECK(Y(1, 0) == cd(0, 1));
    std::mt19937_64 rng(4);
    const Eigen::MatrixXcd H3 = chain_hamiltonian(random_params(3, rng));
    CHECK((H3 - H3.adjoint()).norm() < 1e-12);
}

TEST_CASE("exact gauge makes the generalized force diagonal")
{
    std::mt19937_64 rng(8);
    for (int t = 0; t < 10; ++t) {
        const Eigen::MatrixXcd H = random_hermitian(6, rng), dH = random_hermitian(6, rng);
        const GaugeResult g = exact_gauge(H, dH);
        CHECK(g.degenerate_pairs == 0);
        const Eigen::MatrixXcd G = dH + cd(0, 1) * (g.A * H - H * g.A);
        CHECK((G * H - H * G).norm() < 1e-9);
        CHECK((g.A - g.A.adjoint()).norm() < 1e-9);
    }
}

TEST_CASE("variational gauge over the full operator basis reproduces the exact gauge")
{
    std::mt19937_64 rng(12);
    const auto basis = pauli_strings(2);
    for (int t = 0; t < 5; ++t) {
        const Eigen::MatrixXcd H = random_hermitian(4, rng), dH = random_hermitian(4, rng);
        const VariationalResult v = variational_gauge(H, dH, basis);
        const Eigen::MatrixXcd Av = combine(basis, v.coeff);
        const Eigen::MatrixXcd Ae = exact_gauge(H, dH).A;
        // compare up to the gauge freedom along H-diagonal directions
        CHECK(((Av * H - H * Av) - (Ae * H - H * Ae)).norm() < 1e-8);
    }
}

TEST_CASE("closed-form local coefficients equal the single-site variational optimum")
{
    // n = 2 is excluded: the periodic chain doubles its single bond
    std::mt19937_64 rng(21);
    for (int n : {1, 3, 4, 5}) {
        const ChainParams p = random_params(n, rng), dp = random_params(n, rng);
        std::vector<Eigen::MatrixXcd> basis;
        for (int j = 0; j < n; ++j) basis.push_back(pauli_y(n, j));
        const VariationalResult v = variational_gauge(chain_hamiltonian(p), chain_hamiltonian(dp), basis);
        const std::vector<double> z = local_zeta(p, dp);
        for (int j = 0; j < n; ++j) CHECK(z[j] == doctest::Approx(v.coeff[j]).epsilon(1e-9));
    }
}

TEST_CASE("exact control transports eigenstates at any duration")
{
    std::mt19937_64 rng(30);
    for (double tau : {0.05, 0.5, 3.0}) {
        SpinChainSpec s{random_params(2, rng), random_params(2, rng), tau};
        const Eigen::MatrixXcd H0 = chain_hamiltonian(s.initial), H1 = chain_hamiltonian(s.final_);
        const Eigen::MatrixXcd rho = gibbs_state(H0, 0.4);
        StrokeOptions o;
        o.control = ControlKind::exact;
        o.max_phase_step = 0.01;
        const StrokeResult r = run_stroke(s, rho, o);
        CHECK(fidelity(r.rho, adiabatic_target(rho, H0, H1)) > 1.0 - 1e-9);
        CHECK(std::abs(r.wcd) < 1e-8);
    }
}

TEST_CASE("fidelity and hybrid efficiency")
{
    std::mt19937_64 rng(2);
    const Eigen::MatrixXcd rho = gibbs_state(random_hermitian(4, rng), 0.7);
    CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-10));
    Eigen::Vector2cd a(1, 0), b(std::sqrt(0.5), std::sqrt(0.5));
    CHECK(fidelity(a * a.adjoint(), b * b.adjoint()) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
    CHECK(hybrid_efficiency(-1.0, 0.5, 4.0) == doctest::Approx(1.0 / 4.5));
    CHECK(hybrid_efficiency(-1.0, -0.5, 4.0) == doctest::Approx(0.25));
}

TEST_CASE("slow bare strokes give a converged Otto cycle")
{
    StaCycleSpec s;
    s.chain = {{{0.5, 0.5}, {0.0, 0.0}, {0.1, 0.1}}, {{0.1, 0.1}, {1.0, 1.0}, {0.1, 0.1}}, 40.0};
    StrokeOptions o;
    const StaOutcome out = run_sta_otto(s, o);
    CHECK(out.cycle.first_law_ok());
    CHECK(out.fidelity_ab > 0.999);
    CHECK(out.split.wcd == 0.0);
    CHECK_THROWS(run_sta_otto(StaCycleSpec{}, o));
}
