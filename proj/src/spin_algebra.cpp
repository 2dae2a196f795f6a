#include "qtm/spin_algebra.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace qtm {

bool is_half_integer(double x)
{
    const double t = 2.0 * x;
    return x >= 0.0 && std::abs(t - std::round(t)) < 1e-9;
}

int twice(double x) { return static_cast<int>(std::lround(2.0 * x)); }

void SpinEnsembleSpec::validate() const
{
    if (n_spins < 1) throw std::invalid_argument("n_spins must be >= 1");
    if (!is_half_integer(spin_s) || twice(spin_s) < 1)
        throw std::invalid_argument("spin_s must be a positive half-integer");
    if (!std::isfinite(omega) || omega == 0.0)
        throw std::invalid_argument("omega must be finite and nonzero");
}

CollectiveOperators build_collective_operators(double j)
{
    if (!is_half_integer(j)) throw std::invalid_argument("j must be a nonnegative half-integer");
    const int dim = twice(j) + 1;
    CollectiveOperators ops;
    ops.j = j;
    ops.Jz = Eigen::MatrixXcd::Zero(dim, dim);
    ops.Jplus = Eigen::MatrixXcd::Zero(dim, dim);
    for (int a = 0; a < dim; ++a) {
        const double m = j - a;
        ops.Jz(a, a) = m;
        // J+ |j,m> -> |j,m+1>, which sits one row above
        if (a > 0) ops.Jplus(a - 1, a) = std::sqrt(raising_weight(j, m));
    }
    ops.Jminus = ops.Jplus.adjoint();
    return ops;
}

namespace {

double binomial(int n, int k)
{
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::round(r);
}

}  // namespace

std::vector<DickeBlock> block_decomposition(const SpinEnsembleSpec& spec)
{
    spec.validate();
    std::vector<DickeBlock> out;
    const int N = spec.n_spins;
    const int two_s = twice(spec.spin_s);

    if (two_s == 1) {
        for (int two_j = N % 2; two_j <= N; two_j += 2) {
            const int k = (N - two_j) / 2;
            DickeBlock b;
            b.j = two_j / 2.0;
            b.dim = two_j + 1;
            b.degeneracy = binomial(N, k) - binomial(N, k - 1);
            out.push_back(b);
        }
        return out;
    }

    // iterated angular-momentum addition on multiplicities keyed by 2j
    std::map<int, double> mult{{two_s, 1.0}};
    for (int n = 1; n < N; ++n) {
        std::map<int, double> next;
        for (const auto& [tj, c] : mult)
            for (int tk = std::abs(tj - two_s); tk <= tj + two_s; tk += 2) next[tk] += c;
        mult.swap(next);
    }
    for (const auto& [tj, c] : mult) {
        DickeBlock b;
        b.j = tj / 2.0;
        b.dim = tj + 1;
        b.degeneracy = c;
        out.push_back(b);
    }
    return out;
}

}  // namespace qtm
