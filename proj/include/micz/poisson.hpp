#pragma once

#include "micz/cone.hpp"
#include "micz/liealg.hpp"
#include "micz/monopole.hpp"
#include "micz/report.hpp"

#include <functional>
#include <memory>

namespace micz {

/// A point of the good coordinate patch: position, kinetic momentum,
/// and fiber coordinates T_alpha.
struct PhasePoint {
  int k = 1;
  Eigen::VectorXd x;   // size n = 2k+1
  Eigen::VectorXd pi;  // size n
  AlgElement xi;       // D = k(2k-1) coefficients

  PhasePoint() : xi(1) {}
  PhasePoint(int k_, Eigen::VectorXd x_, Eigen::VectorXd pi_, AlgElement xi_);

  int n() const { return 2 * k + 1; }
  int dim() const { return 2 * n() + algebra_dim(k); }
  double r() const { return x.norm(); }
  double chart_guard_q() const { return chart_q(x); }

  /// Coordinates in engine order (x_1..x_n, pi_1..pi_n, T_1..T_D).
  Eigen::VectorXd flatten() const;
  static PhasePoint unflatten(int k, const Eigen::VectorXd& z);

  /// Throws on non-finite entries, r = 0 or chart-guard violation.
  void validate(double q_min = kDefaultChartGuard) const;
};

/// Real function of a phase point with an optional analytic gradient in
/// engine coordinate order; brackets fall back to central differences
/// (h = 1e-6 * max(1, |coord|)) when the gradient is missing.
struct Observable {
  std::function<double(const PhasePoint&)> value;
  std::function<Eigen::VectorXd(const PhasePoint&)> gradient;
};

Eigen::VectorXd finite_difference_gradient(const std::function<double(const PhasePoint&)>& f,
                                           const PhasePoint& p);

/// Everything the bracket engine needs at one phase point: monopole data
/// with derivatives, scalar field strength, structure constants, and the
/// frequently used scalars.
class PhaseFrame {
 public:
  explicit PhaseFrame(const PhasePoint& p, double q_min = kDefaultChartGuard);

  const PhasePoint& point() const { return p_; }
  int k() const { return p_.k; }
  int n() const { return p_.n(); }
  int d() const { return algebra_dim(p_.k); }
  int dim() const { return p_.dim(); }

  double r() const { return r_; }
  double pi2() const { return pi2_; }
  double radial_momentum() const { return rp_; }  // r . pi
  double Q() const { return Q_; }

  const StructureConstants& constants() const { return *c_; }
  const GaugePotential& potential() const { return pot_; }
  const FieldStrength& field() const { return field_; }
  const MonopoleDerivatives& derivatives() const { return der_; }
  /// Scalar field strength <xi, F_jm>.
  const Eigen::MatrixXd& Fs() const { return fs_; }
  /// d/dx_l of the scalar field strength.
  const Eigen::MatrixXd& dFs(int l) const { return dfs_[static_cast<std::size_t>(l)]; }

  /// Poisson bivector B_ij = {z_i, z_j} on the engine coordinates.
  const Eigen::MatrixXd& bivector() const { return bivector_; }
  /// Analytic gradient of the bivector entry B_ij.
  Eigen::VectorXd bivector_entry_gradient(int i, int j) const;

 private:
  PhasePoint p_;
  double r_, pi2_, rp_, Q_;
  std::shared_ptr<const StructureConstants> c_;
  GaugePotential pot_;
  FieldStrength field_;
  MonopoleDerivatives der_;
  Eigen::MatrixXd fs_;
  std::vector<Eigen::MatrixXd> dfs_;
  Eigen::MatrixXd bivector_;
};

/// {f, g}(p): contraction of the two gradients with the bivector.
double poisson_bracket(const Observable& f, const Observable& g, const PhasePoint& p);
double poisson_bracket(const Observable& f, const Observable& g, const PhaseFrame& frame);

/// Max Jacobi residual of the bivector over all coordinate triples.
double bivector_jacobi_residual(const PhaseFrame& frame);

// ---------------------------------------------------------------------------
// The J family.  Indices run over {-1, 0, 1, ..., 2k+2}; 1..2k+1 are the
// spatial slots.  The metric eta is diag{1, 1, -1, ..., -1} in the order
// -1, 0, 1, ..., 2k+2.
// ---------------------------------------------------------------------------

bool valid_j_index(int a, int k);
double eta(int a);
/// 0-based matrix slot of an index, in the order -1, 0, 1, ..., 2k+2.
int j_slot(int a);
/// Number of indices, 2k+4.
int j_index_count(int k);

double evaluate_J(int a, int b, const PhaseFrame& frame);
double evaluate_J(int a, int b, const PhasePoint& p);
Eigen::VectorXd gradient_J(int a, int b, const PhaseFrame& frame);
Eigen::VectorXd gradient_J(int a, int b, const PhasePoint& p);

Observable observable_J(int a, int b, int k);
Observable observable_hamiltonian(int k);

/// Matrix of all J_ab values, antisymmetric, (2k+4) x (2k+4).
Eigen::MatrixXd moment_map(const PhasePoint& p);
Eigen::MatrixXd moment_map(const PhaseFrame& frame);

// ---------------------------------------------------------------------------
// Relation suites.  Residuals are normalized by max(1, largest |J| entering
// the relation).  The bracket and quadratic suites require xi on the cone;
// with negative_control they instead require an off-cone xi and pass when
// the worst residual stays above the reported threshold.
// ---------------------------------------------------------------------------

VerificationReport check_bracket_relations(const PhasePoint& p, double tol,
                                           bool negative_control = false);
VerificationReport check_quadratic_relations(const PhasePoint& p, double tol,
                                             bool negative_control = false);
/// Covariance of x, pi, F under the J_ij action, the corollary
/// {J_ij, r} = {J_ij, pi^2} = 0, and the dimension-operator relations.
/// These hold for every xi.
VerificationReport check_covariance_relations(const PhasePoint& p, double tol);
/// Regression over the X, Y, W_i, Z_i bracket table.
VerificationReport check_proof_case_relations(const PhasePoint& p, double tol);

/// Engine self-test at sampled points: the six basic relations reproduced
/// on coordinate functions (these are exact) and the Jacobi identity of
/// the bivector.
VerificationReport verify_bracket_engine(int samples, int k, std::uint64_t seed, double tol);

// ---------------------------------------------------------------------------
// Sampling.
// ---------------------------------------------------------------------------

struct LeafSampleOptions {
  double r_min = 0.7;
  double r_max = 1.5;
  double pi_scale = 1.0;
  double q_floor = 0.1;  // keep sampled points well inside the chart
};

/// Deterministic phase point with xi on the charge-mu orbit.
PhasePoint sample_leaf_point(int k, double mu, std::uint64_t seed,
                             const LeafSampleOptions& opts = {});

/// Deterministic off-cone fiber coordinates (requires k >= 2); the result
/// has cone residual bounded away from zero.
AlgElement sample_off_cone(int k, std::uint64_t seed);

}  // namespace micz
