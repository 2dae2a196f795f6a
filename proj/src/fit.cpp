#include "qtm/fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qtm {

double ScalingFit::decades() const
{
    return (x_min > 0.0 && x_max > 0.0) ? std::log10(x_max / x_min) : 0.0;
}

LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_linear needs matched samples");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::domain_error("fit_linear: degenerate abscissa");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double pred = f.intercept + f.slope * x[i];
        ss_res += (y[i] - pred) * (y[i] - pred);
        if (y[i] != 0.0) f.max_rel_residual = std::max(f.max_rel_residual, std::abs(y[i] - pred) / std::abs(y[i]));
    }
    f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return f;
}

ScalingFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y, FitOptions opts)
{
    if (x.size() != y.size()) throw std::invalid_argument("fit_power_law: size mismatch");
    if (static_cast<int>(x.size()) < opts.min_points) throw std::domain_error("fit_power_law: too few points");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0 && y[i] > 0.0)) throw std::domain_error("fit_power_law: nonpositive sample");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    ScalingFit s;
    s.x_min = *std::min_element(x.begin(), x.end());
    s.x_max = *std::max_element(x.begin(), x.end());
    s.n_points = static_cast<int>(x.size());
    if (s.decades() < opts.min_decades) throw std::domain_error("fit_power_law: insufficient decade coverage");
    const LinearFit f = fit_linear(lx, ly);
    s.exponent = f.slope;
    s.prefactor = std::exp(f.intercept);
    s.r_squared = f.r_squared;
    return s;
}

ScalingFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y, double offset, FitOptions opts)
{
    std::vector<double> r(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) r[i] = y[i] - offset;
    return fit_power_law(x, r, opts);
}

OffsetScalingFit fit_power_law_cofit(const std::vector<double>& x, const std::vector<double>& y, double offset_lo,
                                     FitOptions opts)
{
    if (y.empty()) throw std::invalid_argument("fit_power_law_cofit: no samples");
    const double y_min = *std::min_element(y.begin(), y.end());
    const double y_max = *std::max_element(y.begin(), y.end());
    if (!(offset_lo < y_min)) throw std::invalid_argument("fit_power_law_cofit: offset bracket must lie below the data");
    const double hi = y_min - 1e-9 * std::max(1.0, y_max - y_min);
    auto score = [&](double off) { return fit_power_law(x, y, off, opts).r_squared; };
    OffsetScalingFit out;
    out.offset = golden_max(score, offset_lo, hi, 1e-12);
    out.fit = fit_power_law(x, y, out.offset, opts);
    return out;
}

}  // namespace qtm
