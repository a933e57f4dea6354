#pragma once

#include "micz/poisson.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace micz {

struct TrajectoryState {
  double t = 0.0;
  PhasePoint p;
};

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double max_step = 1.0;
  double q_min = kDefaultChartGuard;
  double t_end = 10.0;
  double sample_interval = 0.05;
  double initial_step = 0.0;  // 0 -> heuristic
  long max_steps = 20000000;

  void validate() const;  // throws std::invalid_argument
};

enum class HaltReason { Completed, ChartExit, Collision, StepUnderflow, NonFinite, MaxSteps };

std::string halt_reason_name(HaltReason reason);

/// Per-sample conserved quantities and identity residuals.
struct DiagnosticsSample {
  double t = 0.0;
  double H = 0.0;
  double Q = 0.0;
  double xi_norm = 0.0;
  double cone_res = 0.0;
  double lsq_res = 0.0;     // L^2 - kQ - |r ^ pi|^2, normalized
  double energy_res = 0.0;  // NaN when L^2 - kQ degenerates
  Eigen::MatrixXd L;        // n x n, antisymmetric
  Eigen::VectorXd A;        // n
};

/// Max relative drift of each conserved family over the samples.
struct DriftSummary {
  double H = 0.0;
  double L = 0.0;
  double A = 0.0;
  double Q = 0.0;
  double xi_norm = 0.0;
  double max() const;
};

struct Trajectory {
  int k = 1;
  std::vector<TrajectoryState> states;
  std::vector<DiagnosticsSample> diagnostics;
  HaltReason halt = HaltReason::Completed;
  std::string halt_detail;
  double t_final = 0.0;
  DriftSummary drift;
  long steps_accepted = 0;
  long steps_rejected = 0;
  long rhs_evaluations = 0;
};

/// H = pi^2/2 + Q/(2 r^2) - 1/r.
double hamiltonian(const PhasePoint& p);

/// L_jm = x_j pi_m - x_m pi_j + r^2 <xi, F_jm>, antisymmetric n x n.
Eigen::MatrixXd angular_momentum(const PhasePoint& p);

/// Lenz vector, component form: A_i = -x_i pi^2 + pi_i (r.pi) - r^2 (F pi)_i + x_i / r.
Eigen::VectorXd lenz_vector(const PhasePoint& p);
/// Same vector as the contraction pi _| L + r/r with (pi _| L)_i = pi_j L_ji.
Eigen::VectorXd lenz_vector_interior(const PhasePoint& p);

struct PhaseDerivative {
  Eigen::VectorXd dx;
  Eigen::VectorXd dpi;
  Eigen::VectorXd dxi;
  Eigen::VectorXd flatten() const;
};

PhaseDerivative eom_rhs(const PhasePoint& p, const StructureConstants& c,
                        double q_min = kDefaultChartGuard);
PhaseDerivative eom_rhs(const PhasePoint& p);

/// Adaptive Dormand-Prince 5(4) integration of the equations of motion.
/// Integrates from t = 0 to cfg.t_end (which may be negative); records a
/// sample every cfg.sample_interval plus the final state.  Halts early on
/// chart exit, collision (r under 1e-4), step underflow or non-finite state.
Trajectory integrate(const PhasePoint& p0, const IntegratorConfig& cfg);

/// Radial period 2 pi (-2H)^{-3/2} of a bound orbit; throws for H >= 0.
double kepler_period(double h_value);

struct EnergyIdentityResult {
  std::vector<double> residuals;  // per retained sample
  double max_residual = 0.0;
  int skipped = 0;  // samples with L^2 - kQ too close to zero
};

/// Residual of H = -(1 - A^2) / (2 (L^2 - kQ)) along the trajectory.
EnergyIdentityResult energy_identity(const Trajectory& traj);
double energy_identity_residual(const PhasePoint& p);  // NaN when degenerate

struct ConicFitResult {
  double plane_residual = 0.0;  // rms out-of-plane distance, normalized
  double conic_residual = 0.0;  // rms algebraic conic residual, normalized
  double eccentricity = 0.0;
  std::string classification;  // from the sign of H
  int samples = 0;
};

/// Exploratory: fit the position track to a conic in its best affine
/// 2-plane.  No pass/fail semantics.
ConicFitResult conic_fit(const Trajectory& traj);

/// CSV export: t, x_*, pi_*, T_*, H, Q, |xi|, cone and identity residuals,
/// L components (upper triangle) and Lenz components, 17 significant digits.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

}  // namespace micz
