#include <doctest.h>

#include <cmath>

#include "qtm/thermo.hpp"

using namespace qtm;

namespace {

// two-level medium with gap vartheta, fully thermalized by any bath contact of positive length
class Qubit : public OttoMedium {
public:
    Qubit(double beta_h, double beta_c) : beta_h_(beta_h), beta_c_(beta_c) {}
    double energy() const override { return scale_ * p_; }
    void unitary(double, double to, double) override { scale_ = to; }
    void dissipate(bool hot, double vt, double tau) override
    {
        if (tau > 0.0) p_ = 1.0 / (1.0 + std::exp((hot ? beta_h_ : beta_c_) * vt));
    }

private:
    double beta_h_, beta_c_;
    double scale_ = 1.0;
    double p_ = 0.0;
};

Eigen::Matrix2cd two_level(double s)
{
    Eigen::Matrix2cd H;
    H << 1.0 - s, s, s, -(1.0 - s);
    return H;
}

}  // namespace

TEST_CASE("outcome bookkeeping")
{
    const CycleOutcome c = make_outcome(-2.0, 5.0, -3.0, 4.0);
    CHECK(c.power == doctest::Approx(-0.5));
    CHECK(c.efficiency == doctest::Approx(0.4));
    CHECK(c.is_engine());
    CHECK(c.first_law_residual() == doctest::Approx(0.0));
    CHECK(std::isnan(make_outcome(0.0, 0.0, 0.0, 1.0).efficiency));
    CHECK_FALSE(make_outcome(1.0, 1.0, 0.0, 1.0).first_law_ok());
}

TEST_CASE("adiabatic two-level ramp: work equals the ground energy change")
{
    const int n = 4001;
    std::vector<double> t(n);
    std::vector<Eigen::MatrixXcd> rho(n), H(n);
    for (int k = 0; k < n; ++k) {
        t[k] = double(k) / (n - 1);
        H[k] = two_level(t[k]);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(H[k].cast<std::complex<double>>());
        const Eigen::Vector2cd g = es.eigenvectors().col(0);
        rho[k] = g * g.adjoint();
    }
    const double e0 = -1.0, e1 = -1.0;  // ground energy is -sqrt((1-s)^2 + s^2)
    const double w = work_integral(t, rho, H);
    CHECK(w == doctest::Approx(e1 - e0).epsilon(1e-6));

    std::vector<TrajectorySample> traj;
    for (int k = 0; k < n; ++k) traj.push_back({t[k], rho[k], H[k]});
    CHECK(work_integral(traj) == doctest::Approx(w).epsilon(1e-14));
    CHECK_THROWS(work_integral({0.0, 1.0}, {rho[0]}, {H[0], H[1]}));
}

TEST_CASE("qubit Otto cycle reaches the closed-form limit cycle")
{
    const double bh = 0.2, bc = 2.0, vc = 1.0, vh = 3.0;
    Qubit q(bh, bc);
    OttoProtocol pr;
    pr.vartheta_c = vc;
    pr.vartheta_h = vh;
    pr.tau2 = pr.tau4 = 1.0;
    const OttoRun run = run_otto(q, pr, 10);
    REQUIRE(run.converged);
    const double pc = 1.0 / (1.0 + std::exp(bc * vc)), ph = 1.0 / (1.0 + std::exp(bh * vh));
    const CycleOutcome c = run.limit();
    CHECK(c.work == doctest::Approx((vh - vc) * (pc - ph)));
    CHECK(c.heat_hot == doctest::Approx(vh * (ph - pc)));
    CHECK(c.efficiency == doctest::Approx(1.0 - vc / vh));
    CHECK(c.first_law_ok());
    CHECK(c.efficiency <= 1.0 - bh / bc);
    CHECK(run.last_strokes.size() == 4);
    CHECK(run.last_strokes[1].kind == StrokeKind::dissipative);
}

TEST_CASE("heat from energy and negative durations")
{
    const Eigen::Matrix2cd H = two_level(0.0);
    Eigen::Matrix2cd a = Eigen::Matrix2cd::Zero(), b = Eigen::Matrix2cd::Zero();
    a(0, 0) = 1.0;
    b(1, 1) = 1.0;
    CHECK(heat_from_energy(a, b, H) == doctest::Approx(-2.0));
    Qubit q(1, 2);
    OttoProtocol pr;
    pr.tau1 = -1.0;
    CHECK_THROWS_AS(run_otto(q, pr, 3), std::invalid_argument);
}
