#pragma once

#include <cmath>
#include <vector>

namespace qtm {

struct ScalingFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double r_squared = 0.0;
    double x_min = 0.0, x_max = 0.0;
    int n_points = 0;

    double decades() const;
    bool acceptance_grade() const { return r_squared >= 0.98 && decades() >= 1.5; }
};

struct FitOptions {
    int min_points = 8;
    double min_decades = 1.5;
};

// log-log least squares y = prefactor * x^exponent; throws std::domain_error on nonpositive data
// or insufficient coverage
ScalingFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y, FitOptions opts = {});

// fit of y - offset; the offset must lie below every sample
ScalingFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y, double offset, FitOptions opts);

struct OffsetScalingFit {
    ScalingFit fit;
    double offset = 0.0;
};

// co-fits the offset by golden-section maximization of r^2 over [offset_lo, min(y))
OffsetScalingFit fit_power_law_cofit(const std::vector<double>& x, const std::vector<double>& y, double offset_lo,
                                     FitOptions opts = {});

struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r_squared = 0.0;
    double max_rel_residual = 0.0;
};

LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y);

// golden-section maximization of f on [lo, hi]
template <class F>
double golden_max(F&& f, double lo, double hi, double tol = 1e-8, int max_iter = 200)
{
    const double g = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < max_iter && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++i) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace qtm
