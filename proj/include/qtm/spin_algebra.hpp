#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace qtm {

struct SpinEnsembleSpec {
    int n_spins = 1;
    double spin_s = 0.5;
    double omega = 1.0;

    void validate() const;
    // largest total spin N*s
    double max_j() const { return n_spins * spin_s; }
};

struct DickeBlock {
    double j = 0.0;
    int dim = 1;
    double degeneracy = 1.0;  // l_j, exact for counts below 2^53
};

struct CollectiveOperators {
    double j = 0.0;
    Eigen::MatrixXcd Jz;
    Eigen::MatrixXcd Jplus;
    Eigen::MatrixXcd Jminus;
};

// true when 2x is a nonnegative integer (to 1e-9)
bool is_half_integer(double x);
int twice(double x);

// basis |j,m>, m = j, j-1, ..., -j
CollectiveOperators build_collective_operators(double j);

// Blocks sorted by ascending j.
std::vector<DickeBlock> block_decomposition(const SpinEnsembleSpec& spec);

// <j,m|J+J-|j,m> and <j,m|J-J+|j,m>
inline double lowering_weight(double j, double m) { return (j + m) * (j - m + 1.0); }
inline double raising_weight(double j, double m) { return (j - m) * (j + m + 1.0); }

}  // namespace qtm
