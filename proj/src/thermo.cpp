#include "qtm/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace qtm {

double CycleOutcome::first_law_residual() const { return std::abs(work + heat_hot + heat_cold); }

bool CycleOutcome::first_law_ok(double rel) const
{
    const double scale = std::max({std::abs(work), std::abs(heat_hot), 1.0});
    return first_law_residual() <= rel * scale;
}

std::string CycleOutcome::csv_header() { return "W,Q_h,Q_c,eta,P,tau_cyc,converged"; }

std::string CycleOutcome::csv_row() const
{
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%d", work, heat_hot, heat_cold,
                  efficiency, power, cycle_time, converged ? 1 : 0);
    return buf;
}

CycleOutcome make_outcome(double work, double q_hot, double q_cold, double cycle_time)
{
    CycleOutcome c;
    c.work = work;
    c.heat_hot = q_hot;
    c.heat_cold = q_cold;
    c.cycle_time = cycle_time;
    c.power = cycle_time > 0.0 ? work / cycle_time : std::numeric_limits<double>::quiet_NaN();
    c.efficiency = q_hot != 0.0 ? -work / q_hot : std::numeric_limits<double>::quiet_NaN();
    return c;
}

double work_integral(const std::vector<double>& t, const std::vector<Eigen::MatrixXcd>& rho,
                     const std::vector<Eigen::MatrixXcd>& H)
{
    if (t.size() != rho.size() || t.size() != H.size())
        throw std::invalid_argument("trajectory grids have mismatched lengths");
    double w = 0.0;
    for (size_t k = 0; k + 1 < t.size(); ++k) {
        const Eigen::MatrixXcd dH = H[k + 1] - H[k];
        w += 0.5 * ((rho[k] * dH).trace().real() + (rho[k + 1] * dH).trace().real());
    }
    return w;
}

double work_integral(const std::vector<TrajectorySample>& traj)
{
    double w = 0.0;
    for (size_t k = 0; k + 1 < traj.size(); ++k) {
        if (traj[k].rho.rows() != traj[k + 1].rho.rows() || traj[k].H.rows() != traj[k].rho.rows())
            throw std::invalid_argument("trajectory samples have mismatched dimensions");
        const Eigen::MatrixXcd dH = traj[k + 1].H - traj[k].H;
        w += 0.5 * ((traj[k].rho * dH).trace().real() + (traj[k + 1].rho * dH).trace().real());
    }
    return w;
}

double heat_from_energy(const Eigen::MatrixXcd& rho_i, const Eigen::MatrixXcd& rho_f,
                        const Eigen::MatrixXcd& H)
{
    return (rho_f * H).trace().real() - (rho_i * H).trace().real();
}

OttoRun run_otto(OttoMedium& wm, const OttoProtocol& pr, int n_cycles, double rel_tol)
{
    if (pr.tau1 < 0 || pr.tau2 < 0 || pr.tau3 < 0 || pr.tau4 < 0)
        throw std::invalid_argument("negative stroke duration");
    OttoRun run;
    for (int c = 0; c < n_cycles; ++c) {
        std::vector<StrokeRecord> strokes(4);
        auto unit = [&](StrokeRecord& r, double from, double to, double tau) {
            r.kind = StrokeKind::unitary;
            r.duration = tau;
            r.energy_in = wm.energy();
            wm.unitary(from, to, tau);
            r.energy_out = wm.energy();
            r.work = r.energy_out - r.energy_in;
        };
        auto diss = [&](StrokeRecord& r, bool hot, double vt, double tau) {
            r.kind = StrokeKind::dissipative;
            r.duration = tau;
            r.energy_in = wm.energy();
            wm.dissipate(hot, vt, tau);
            r.energy_out = wm.energy();
            r.heat = r.energy_out - r.energy_in;
        };
        unit(strokes[0], pr.vartheta_c, pr.vartheta_h, pr.tau1);
        diss(strokes[1], true, pr.vartheta_h, pr.tau2);
        unit(strokes[2], pr.vartheta_h, pr.vartheta_c, pr.tau3);
        diss(strokes[3], false, pr.vartheta_c, pr.tau4);

        CycleOutcome out = make_outcome(strokes[0].work + strokes[2].work, strokes[1].heat,
                                        strokes[3].heat, pr.cycle_time());
        out.converged = false;
        if (!run.cycles.empty()) {
            const double prev = run.cycles.back().work;
            const double scale = std::max(std::abs(out.work), 1e-300);
            if (std::abs(out.work - prev) <= rel_tol * scale && out.first_law_ok()) out.converged = true;
        }
        run.cycles.push_back(out);
        run.last_strokes = strokes;
        if (out.converged) {
            run.converged = true;
            break;
        }
    }
    return run;
}

}  // namespace qtm
