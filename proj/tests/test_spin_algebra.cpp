#include <doctest.h>

#include <map>
#include <random>

#include "qtm/spin_algebra.hpp"

using namespace qtm;

namespace {

// number of product states of N spins-s with total 2M = key
std::map<int, double> m_multiplicities(int n, double s)
{
    std::map<int, double> c{{0, 1.0}};
    const int ts = twice(s);
    for (int i = 0; i < n; ++i) {
        std::map<int, double> next;
        for (const auto& [m2, w] : c)
            for (int k = -ts; k <= ts; k += 2) next[m2 + k] += w;
        c = next;
    }
    return c;
}

}  // namespace

TEST_CASE("collective operators satisfy the su(2) algebra")
{
    for (double j : {0.5, 1.0, 2.5, 7.0}) {
        const CollectiveOperators op = build_collective_operators(j);
        const int d = int(2 * j + 1);
        REQUIRE(op.Jz.rows() == d);
        const Eigen::MatrixXcd comm = op.Jplus * op.Jminus - op.Jminus * op.Jplus;
        CHECK((comm - 2.0 * op.Jz).norm() < 1e-12);
        CHECK((op.Jminus - op.Jplus.adjoint()).norm() < 1e-12);
        const Eigen::MatrixXcd Jx = 0.5 * (op.Jplus + op.Jminus);
        const Eigen::MatrixXcd Jy = std::complex<double>(0, -0.5) * (op.Jplus - op.Jminus);
        const Eigen::MatrixXcd J2 = Jx * Jx + Jy * Jy + op.Jz * op.Jz;
        CHECK((J2 - j * (j + 1) * Eigen::MatrixXcd::Identity(d, d)).norm() < 1e-10);
        CHECK(op.Jz(0, 0).real() == doctest::Approx(j));
        for (int a = 0; a < d; ++a) {
            const double m = j - a;
            const Eigen::MatrixXcd pm = op.Jplus * op.Jminus;
            CHECK(pm(a, a).real() == doctest::Approx(lowering_weight(j, m)));
            const Eigen::MatrixXcd mp = op.Jminus * op.Jplus;
            CHECK(mp(a, a).real() == doctest::Approx(raising_weight(j, m)));
        }
    }
}

TEST_CASE("block decomposition matches a brute-force multiplicity count")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 1 + int(rng() % 9);
        const double s = 0.5 * double(1 + rng() % 4);
        const SpinEnsembleSpec spec{n, s, 1.0};
        const auto blocks = block_decomposition(spec);
        const auto c = m_multiplicities(n, s);
        double total = 0.0;
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            if (i > 0) CHECK(blocks[i].j > blocks[i - 1].j);
            const int tj = twice(blocks[i].j);
            const double above = c.count(tj + 2) ? c.at(tj + 2) : 0.0;
            CHECK(blocks[i].degeneracy == doctest::Approx(c.at(tj) - above));
            CHECK(blocks[i].dim == tj + 1);
            total += blocks[i].degeneracy * blocks[i].dim;
        }
        CHECK(total == doctest::Approx(std::pow(2 * s + 1, n)));
        CHECK(blocks.back().j == doctest::Approx(spec.max_j()));
    }
}

TEST_CASE("half-integer helpers")
{
    CHECK(is_half_integer(1.5));
    CHECK(is_half_integer(0.0));
    CHECK_FALSE(is_half_integer(0.3));
    CHECK_FALSE(is_half_integer(-0.5));
    CHECK(twice(2.5) == 5);
    CHECK_THROWS(SpinEnsembleSpec{0, 0.5, 1.0}.validate());
    CHECK_THROWS(SpinEnsembleSpec{3, 0.7, 1.0}.validate());
}
