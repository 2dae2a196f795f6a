#pragma once

#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qtm {

enum class StrokeKind { unitary, dissipative };

struct StrokeRecord {
    StrokeKind kind = StrokeKind::unitary;
    double duration = 0.0;
    double energy_in = 0.0;
    double energy_out = 0.0;
    double work = 0.0;
    double heat = 0.0;
};

// W = -(Q_h + Q_c); engine when W < 0 and Q_h > 0
struct CycleOutcome {
    double work = 0.0;
    double heat_hot = 0.0;
    double heat_cold = 0.0;
    double efficiency = std::numeric_limits<double>::quiet_NaN();
    double power = 0.0;
    double cycle_time = 0.0;
    bool converged = true;

    double first_law_residual() const;
    bool first_law_ok(double rel = 1e-9) const;
    bool is_engine() const { return work < 0.0 && heat_hot > 0.0; }

    static std::string csv_header();
    std::string csv_row() const;
};

// Fill efficiency and power from work, heats and cycle time. Efficiency is NaN when Q_h == 0.
CycleOutcome make_outcome(double work, double q_hot, double q_cold, double cycle_time);

struct TrajectorySample {
    double t;
    Eigen::MatrixXcd rho;
    Eigen::MatrixXcd H;
};

// trapezoid on Tr[rho dH/dt] with dH from consecutive samples
double work_integral(const std::vector<TrajectorySample>& traj);
double work_integral(const std::vector<double>& t, const std::vector<Eigen::MatrixXcd>& rho,
                     const std::vector<Eigen::MatrixXcd>& H);

double heat_from_energy(const Eigen::MatrixXcd& rho_i, const Eigen::MatrixXcd& rho_f,
                        const Eigen::MatrixXcd& H);

struct OttoProtocol {
    double vartheta_c = 1.0;
    double vartheta_h = 2.0;
    double tau1 = 0.0, tau2 = 0.0, tau3 = 0.0, tau4 = 0.0;
    double cycle_time() const { return tau1 + tau2 + tau3 + tau4; }
};

// Working medium driven by run_otto. Strokes mutate the held state and return the
// energy change they cause.
class OttoMedium {
public:
    virtual ~OttoMedium() = default;
    virtual double energy() const = 0;
    // unitary stroke between two Hamiltonian scales
    virtual void unitary(double from, double to, double tau) = 0;
    // contact with the hot (true) or cold bath at fixed scale
    virtual void dissipate(bool hot, double vartheta, double tau) = 0;
};

struct OttoRun {
    std::vector<CycleOutcome> cycles;
    std::vector<StrokeRecord> last_strokes;
    bool converged = false;
    CycleOutcome limit() const { return cycles.empty() ? CycleOutcome{} : cycles.back(); }
};

// A->B unitary c->h, B->C hot, C->D unitary h->c, D->A cold. A limit cycle is declared once
// successive works agree to `rel_tol` and the first law closes to 1e-9.
OttoRun run_otto(OttoMedium& wm, const OttoProtocol& protocol, int n_cycles, double rel_tol = 1e-8);

}  // namespace qtm
