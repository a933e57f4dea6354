#include "micz/poisson.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace micz {

bool valid_j_index(int a, int k) { return a == -1 || (a >= 0 && a <= 2 * k + 2); }

double eta(int a) { return (a == -1 || a == 0) ? 1.0 : -1.0; }

int j_slot(int a) { return a + 1; }

int j_index_count(int k) { return 2 * k + 4; }

namespace {

void require_j_indices(int a, int b, int k) {
  if (!valid_j_index(a, k) || !valid_j_index(b, k))
    throw std::invalid_argument("J index out of range for k=" + std::to_string(k) + ": (" +
                                std::to_string(a) + "," + std::to_string(b) + ")");
}

bool is_spatial(int a, int n) { return a >= 1 && a <= n; }

// Values of the canonical families; i, j are 0-based spatial slots.

double value_Jij(const PhaseFrame& f, int i, int j) {
  const auto& p = f.point();
  return p.x[i] * p.pi[j] - p.x[j] * p.pi[i] + f.r() * f.r() * f.Fs()(i, j);
}

double value_Ji0(const PhaseFrame& f, int i) { return f.r() * f.point().pi[i]; }

double value_S(const PhaseFrame& f) { return 0.5 * (f.r() * f.pi2() + f.Q() / f.r()); }

double value_K(const PhaseFrame& f, int i) {
  const auto& p = f.point();
  const double r = f.r();
  const double fpi = f.Fs().row(i).dot(p.pi);
  return 0.5 * p.x[i] * f.pi2() - p.pi[i] * f.radial_momentum() + r * r * fpi -
         0.5 * f.Q() * p.x[i] / (r * r);
}

Eigen::VectorXd grad_Jij(const PhaseFrame& f, int i, int j) {
  const auto& p = f.point();
  const int n = p.n();
  const double r2 = f.r() * f.r();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(p.dim());
  for (int l = 0; l < n; ++l)
    g[l] = 2.0 * p.x[l] * f.Fs()(i, j) + r2 * f.dFs(l)(i, j);
  g[i] += p.pi[j];
  g[j] -= p.pi[i];
  g[n + i] -= p.x[j];
  g[n + j] += p.x[i];
  g.segment(2 * n, algebra_dim(p.k)) = r2 * f.field().at(i, j).coeffs();
  return g;
}

Eigen::VectorXd grad_Ji0(const PhaseFrame& f, int i) {
  const auto& p = f.point();
  const int n = p.n();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(p.dim());
  g.segment(0, n) = (p.pi[i] / f.r()) * p.x;
  g[n + i] = f.r();
  return g;
}

Eigen::VectorXd grad_S(const PhaseFrame& f) {
  const auto& p = f.point();
  const int n = p.n();
  const double r = f.r();
  Eigen::VectorXd g = Eigen::VectorXd::Zero(p.dim());
  g.segment(0, n) = (0.5 * (f.pi2() - f.Q() / (r * r)) / r) * p.x;
  g.segment(n, n) = r * p.pi;
  g.segment(2 * n, algebra_dim(p.k)) = p.xi.coeffs() / (p.k * r);
  return g;
}

Eigen::VectorXd grad_K(const PhaseFrame& f, int i) {
  const auto& p = f.point();
  const int n = p.n();
  const int d = algebra_dim(p.k);
  const double r = f.r();
  const double r2 = r * r;
  const double fpi = f.Fs().row(i).dot(p.pi);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(p.dim());
  for (int l = 0; l < n; ++l) {
    g[l] = -p.pi[i] * p.pi[l] + 2.0 * p.x[l] * fpi + r2 * f.dFs(l).row(i).dot(p.pi) +
           f.Q() * p.x[i] * p.x[l] / (r2 * r2);
  }
  g[i] += 0.5 * f.pi2() - 0.5 * f.Q() / r2;
  for (int l = 0; l < n; ++l)
    g[n + l] = p.x[i] * p.pi[l] - p.pi[i] * p.x[l] + r2 * f.Fs()(i, l);
  g[n + i] -= f.radial_momentum();
  Eigen::VectorXd gt = Eigen::VectorXd::Zero(d);
  for (int j = 0; j < n; ++j)
    if (j != i) gt += p.pi[j] * f.field().at(i, j).coeffs();
  gt *= r2;
  gt -= (p.x[i] / (p.k * r2)) * p.xi.coeffs();
  g.segment(2 * n, d) = gt;
  return g;
}

Eigen::VectorXd grad_radial_x(const PhaseFrame& f, double w) {
  // gradient of w * r in the x block
  Eigen::VectorXd g = Eigen::VectorXd::Zero(f.dim());
  g.segment(0, f.n()) = (w / f.r()) * f.point().x;
  return g;
}

}  // namespace

double evaluate_J(int a, int b, const PhaseFrame& frame) {
  const int k = frame.k();
  require_j_indices(a, b, k);
  if (a == b) return 0.0;
  const int n = frame.n();
  const int top = 2 * k + 2;
  if (is_spatial(a, n) && is_spatial(b, n)) return value_Jij(frame, a - 1, b - 1);
  if (is_spatial(a, n)) {
    if (b == 0) return value_Ji0(frame, a - 1);
    if (b == top) return value_K(frame, a - 1) - 0.5 * frame.point().x[a - 1];
    return value_K(frame, a - 1) + 0.5 * frame.point().x[a - 1];  // b == -1
  }
  if (is_spatial(b, n)) return -evaluate_J(b, a, frame);
  if (a == top && b == 0) return value_S(frame) - 0.5 * frame.r();
  if (a == -1 && b == 0) return value_S(frame) + 0.5 * frame.r();
  if (a == top && b == -1) return frame.radial_momentum();
  return -evaluate_J(b, a, frame);
}

double evaluate_J(int a, int b, const PhasePoint& p) { return evaluate_J(a, b, PhaseFrame(p)); }

Eigen::VectorXd gradient_J(int a, int b, const PhaseFrame& frame) {
  const int k = frame.k();
  require_j_indices(a, b, k);
  if (a == b) return Eigen::VectorXd::Zero(frame.dim());
  const int n = frame.n();
  const int top = 2 * k + 2;
  if (is_spatial(a, n) && is_spatial(b, n)) return grad_Jij(frame, a - 1, b - 1);
  if (is_spatial(a, n)) {
    if (b == 0) return grad_Ji0(frame, a - 1);
    Eigen::VectorXd g = grad_K(frame, a - 1);
    g[a - 1] += (b == top) ? -0.5 : 0.5;
    return g;
  }
  if (is_spatial(b, n)) return -gradient_J(b, a, frame);
  if (a == top && b == 0) return grad_S(frame) + grad_radial_x(frame, -0.5);
  if (a == -1 && b == 0) return grad_S(frame) + grad_radial_x(frame, 0.5);
  if (a == top && b == -1) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(frame.dim());
    g.segment(0, n) = frame.point().pi;
    g.segment(n, n) = frame.point().x;
    return g;
  }
  return -gradient_J(b, a, frame);
}

Eigen::VectorXd gradient_J(int a, int b, const PhasePoint& p) {
  return gradient_J(a, b, PhaseFrame(p));
}

Observable observable_J(int a, int b, int k) {
  Observable obs;
  obs.value = [a, b](const PhasePoint& p) { return evaluate_J(a, b, p); };
  obs.gradient = [a, b](const PhasePoint& p) { return gradient_J(a, b, p); };
  (void)k;
  return obs;
}

Observable observable_hamiltonian(int k) {
  Observable obs;
  obs.value = [](const PhasePoint& p) {
    const double r = p.r();
    return 0.5 * p.pi.squaredNorm() + 0.5 * casimir_Q(p.xi) / (r * r) - 1.0 / r;
  };
  obs.gradient = [k](const PhasePoint& p) {
    const int n = p.n();
    const double r = p.r();
    const double q = casimir_Q(p.xi);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(p.dim());
    g.segment(0, n) = (1.0 / (r * r * r) - q / (r * r * r * r)) * p.x;
    g.segment(n, n) = p.pi;
    g.segment(2 * n, algebra_dim(k)) = p.xi.coeffs() / (k * r * r);
    return g;
  };
  return obs;
}

Eigen::MatrixXd moment_map(const PhaseFrame& frame) {
  const int k = frame.k();
  const int count = j_index_count(k);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(count, count);
  for (int a = -1; a <= 2 * k + 2; ++a)
    for (int b = a + 1; b <= 2 * k + 2; ++b) {
      const double v = evaluate_J(a, b, frame);
      m(j_slot(a), j_slot(b)) = v;
      m(j_slot(b), j_slot(a)) = -v;
    }
  return m;
}

Eigen::MatrixXd moment_map(const PhasePoint& p) { return moment_map(PhaseFrame(p)); }

namespace {

constexpr double kNegativeControlFloor = 1e-3;

void require_cone_state(const PhasePoint& p, bool negative_control) {
  const double res = cone_residual(p.xi);
  if (!negative_control && res > 1e-8)
    throw std::domain_error("relations hold only on the magnetic cone; cone residual = " +
                            std::to_string(res) + " (use the negative-control flag off-cone)");
  if (negative_control && res <= 1e-4)
    throw std::invalid_argument("negative control requires an off-cone xi (residual " +
                                std::to_string(res) + ")");
}

std::vector<std::pair<int, int>> index_pairs(int k) {
  std::vector<std::pair<int, int>> pairs;
  for (int a = -1; a <= 2 * k + 2; ++a)
    for (int b = a + 1; b <= 2 * k + 2; ++b) pairs.emplace_back(a, b);
  return pairs;
}

}  // namespace

VerificationReport check_bracket_relations(const PhasePoint& p, double tol,
                                           bool negative_control) {
  require_cone_state(p, negative_control);
  const PhaseFrame frame(p);
  const auto pairs = index_pairs(p.k);
  const int np = static_cast<int>(pairs.size());

  const Eigen::MatrixXd jmat = moment_map(frame);
  const double jscale = std::max(1.0, jmat.cwiseAbs().maxCoeff());

  Eigen::MatrixXd grads(np, p.dim());
  for (int i = 0; i < np; ++i) grads.row(i) = gradient_J(pairs[i].first, pairs[i].second, frame);
  const Eigen::MatrixXd brackets = grads * frame.bivector() * grads.transpose();

  double worst = 0.0;
  int quadruples = 0;
  for (int i = 0; i < np; ++i)
    for (int j = i; j < np; ++j) {
      const auto [a, b] = pairs[i];
      const auto [a2, b2] = pairs[j];
      double rhs = 0.0;
      if (a == a2) rhs -= eta(a) * jmat(j_slot(b), j_slot(b2));
      if (b == b2) rhs -= eta(b) * jmat(j_slot(a), j_slot(a2));
      if (a == b2) rhs += eta(a) * jmat(j_slot(b), j_slot(a2));
      if (b == a2) rhs += eta(b) * jmat(j_slot(a), j_slot(b2));
      worst = std::max(worst, std::abs(brackets(i, j) - rhs) / jscale);
      ++quadruples;
    }

  VerificationReport report;
  report.suite = "bracket_relations";
  report.k = p.k;
  report.samples = quadruples;
  report.tol = tol;
  if (negative_control)
    report.checks.push_back(IdentityCheck::inverted("bracket_relations_negative_control", worst,
                                                    kNegativeControlFloor, quadruples));
  else
    report.checks.push_back(IdentityCheck::direct("bracket_relations", worst, tol, quadruples));
  return report;
}

VerificationReport check_quadratic_relations(const PhasePoint& p, double tol,
                                             bool negative_control) {
  require_cone_state(p, negative_control);
  const PhaseFrame frame(p);
  const Eigen::MatrixXd jmat = moment_map(frame);
  const double jscale = std::max(1.0, jmat.cwiseAbs().maxCoeff());
  const int k = p.k;
  const double q = frame.Q();

  double worst = 0.0;
  double primary = 0.0;
  int relations = 0;
  for (int b = -1; b <= 2 * k + 2; ++b)
    for (int c = b; c <= 2 * k + 2; ++c) {
      double lhs = 0.0;
      for (int a = -1; a <= 2 * k + 2; ++a)
        lhs += eta(a) * jmat(j_slot(a), j_slot(b)) * jmat(j_slot(a), j_slot(c));
      const double rhs = (b == c) ? eta(b) * q : 0.0;
      const double res = std::abs(lhs - rhs) / jscale;
      worst = std::max(worst, res);
      if (b == 0 && c == 0) primary = res;
      ++relations;
    }

  // Matrix restatement J^T eta J = Q eta.
  const int count = j_index_count(k);
  Eigen::VectorXd etadiag(count);
  for (int a = -1; a <= 2 * k + 2; ++a) etadiag[j_slot(a)] = eta(a);
  const Eigen::MatrixXd lhsm = jmat.transpose() * etadiag.asDiagonal() * jmat;
  const Eigen::MatrixXd rhsm = q * Eigen::MatrixXd(etadiag.asDiagonal());
  const double matrix_res = (lhsm - rhsm).cwiseAbs().maxCoeff() / jscale;

  VerificationReport report;
  report.suite = "quadratic_relations";
  report.k = p.k;
  report.samples = relations;
  report.tol = tol;
  if (negative_control) {
    report.checks.push_back(IdentityCheck::inverted("quadratic_relations_negative_control", worst,
                                                    kNegativeControlFloor, relations));
  } else {
    report.checks.push_back(IdentityCheck::direct("quadratic_relations", worst, tol, relations));
    report.checks.push_back(IdentityCheck::direct("primary_relation", primary, tol, 1));
    report.checks.push_back(IdentityCheck::direct("matrix_form", matrix_res, tol, 1));
  }
  return report;
}

VerificationReport check_covariance_relations(const PhasePoint& p, double tol) {
  const PhaseFrame frame(p);
  const int n = p.n();
  const int d = algebra_dim(p.k);
  const Eigen::MatrixXd& b = frame.bivector();
  const double r = frame.r();
  const double r2 = r * r;
  const double scale =
      std::max({1.0, p.x.cwiseAbs().maxCoeff(), p.pi.cwiseAbs().maxCoeff(), frame.pi2(),
                r2 * frame.Fs().cwiseAbs().maxCoeff()});

  double worst_x = 0.0, worst_pi = 0.0, worst_f = 0.0, worst_scalar = 0.0, worst_dim = 0.0;

  auto fs_gradient = [&](int i, int j) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(p.dim());
    for (int l = 0; l < n; ++l) g[l] = frame.dFs(l)(i, j);
    g.segment(2 * n, d) = frame.field().at(i, j).coeffs();
    return g;
  };

  Eigen::VectorXd grad_r = Eigen::VectorXd::Zero(p.dim());
  grad_r.segment(0, n) = p.x / r;
  Eigen::VectorXd grad_pi2 = Eigen::VectorXd::Zero(p.dim());
  grad_pi2.segment(n, n) = 2.0 * p.pi;

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Eigen::VectorXd gj = grad_Jij(frame, i, j);
      const Eigen::VectorXd row = b.transpose() * gj;  // row[m] = {J_ij, z_m}
      for (int m = 0; m < n; ++m) {
        const double ex = -p.x[i] * (j == m ? 1.0 : 0.0) + p.x[j] * (i == m ? 1.0 : 0.0);
        const double epi = -p.pi[i] * (j == m ? 1.0 : 0.0) + p.pi[j] * (i == m ? 1.0 : 0.0);
        worst_x = std::max(worst_x, std::abs(row[m] - ex));
        worst_pi = std::max(worst_pi, std::abs(row[n + m] - epi));
      }
      for (int i2 = 0; i2 < n; ++i2)
        for (int j2 = i2 + 1; j2 < n; ++j2) {
          const double lhs = gj.dot(b * fs_gradient(i2, j2));
          const auto kr = [](int u, int v) { return u == v ? 1.0 : 0.0; };
          const double rhs = kr(i, i2) * frame.Fs()(j, j2) + kr(j, j2) * frame.Fs()(i, i2) -
                             kr(i, j2) * frame.Fs()(j, i2) - kr(j, i2) * frame.Fs()(i, j2);
          worst_f = std::max(worst_f, std::abs(lhs - rhs));
        }
      worst_scalar = std::max(worst_scalar, std::abs(gj.dot(b * grad_r)));
      worst_scalar = std::max(worst_scalar, std::abs(gj.dot(b * grad_pi2)));
    }

  // Dimension operator J_{2k+2,-1} = r . pi.
  {
    Eigen::VectorXd gd = Eigen::VectorXd::Zero(p.dim());
    gd.segment(0, n) = p.pi;
    gd.segment(n, n) = p.x;
    const Eigen::VectorXd row = b.transpose() * gd;
    for (int m = 0; m < n; ++m) {
      worst_dim = std::max(worst_dim, std::abs(row[m] + p.x[m]));
      worst_dim = std::max(worst_dim, std::abs(row[n + m] - p.pi[m]));
    }
    worst_dim = std::max(worst_dim, std::abs(gd.dot(b * grad_r) + r));
    Eigen::VectorXd grad_invr = Eigen::VectorXd::Zero(p.dim());
    grad_invr.segment(0, n) = -p.x / (r2 * r);
    worst_dim = std::max(worst_dim, std::abs(gd.dot(b * grad_invr) - 1.0 / r));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Eigen::VectorXd gf = r2 * fs_gradient(i, j);
        gf.segment(0, n) += 2.0 * frame.Fs()(i, j) * p.x;
        worst_dim = std::max(worst_dim, std::abs(gd.dot(b * gf)));
      }
  }

  VerificationReport report;
  report.suite = "covariance_relations";
  report.k = p.k;
  report.tol = tol;
  const int npairs = n * (n - 1) / 2;
  report.samples = npairs;
  report.checks.push_back(IdentityCheck::direct("covariance_x", worst_x / scale, tol, npairs * n));
  report.checks.push_back(
      IdentityCheck::direct("covariance_pi", worst_pi / scale, tol, npairs * n));
  report.checks.push_back(
      IdentityCheck::direct("covariance_F", worst_f / scale, tol, npairs * npairs));
  report.checks.push_back(
      IdentityCheck::direct("rotation_scalars", worst_scalar / scale, tol, npairs * 2));
  report.checks.push_back(
      IdentityCheck::direct("dimension_operator", worst_dim / scale, tol, 2 * n + 3));
  return report;
}

VerificationReport check_proof_case_relations(const PhasePoint& p, double tol) {
  require_cone_state(p, false);
  const PhaseFrame frame(p);
  const int n = p.n();
  const int top = 2 * p.k + 2;
  const Eigen::MatrixXd& b = frame.bivector();

  const double x_val = 2.0 * value_S(frame);  // X = r pi^2 + Q/r
  const double rp = frame.radial_momentum();
  const Eigen::VectorXd grad_x = 2.0 * grad_S(frame);
  const Eigen::VectorXd grad_y = grad_radial_x(frame, 1.0);

  std::vector<Eigen::VectorXd> grad_w(n), grad_z(n), grad_j0(n);
  for (int i = 0; i < n; ++i) {
    grad_w[i] = Eigen::VectorXd::Zero(p.dim());
    grad_w[i][i] = 1.0;
    grad_z[i] = 2.0 * grad_K(frame, i);
    grad_j0[i] = grad_Ji0(frame, i);
  }

  const double scale = std::max({1.0, std::abs(x_val), frame.r(), std::abs(rp)});
  double worst_case1 = 0.0, worst_case2 = 0.0, worst_case3 = 0.0, worst_case4 = 0.0;

  // Case 1: the defining relations.
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double lhs = grad_j0[i].dot(b * grad_j0[j]);
      worst_case1 = std::max(worst_case1, std::abs(lhs + value_Jij(frame, i, j)));
    }
    const double lhs_top = grad_j0[i].dot(b * gradient_J(top, 0, frame));
    worst_case1 =
        std::max(worst_case1, std::abs(lhs_top + evaluate_J(i + 1, top, frame)));
    const double lhs_m1 = grad_j0[i].dot(b * gradient_J(-1, 0, frame));
    worst_case1 = std::max(worst_case1, std::abs(lhs_m1 + evaluate_J(i + 1, -1, frame)));
  }
  worst_case1 = std::max(
      worst_case1, std::abs(gradient_J(top, 0, frame).dot(b * gradient_J(-1, 0, frame)) + rp));

  // Case 2: {W_i, Y} = {Z_i, X} = 0, {W_i, X} = {Z_i, Y} = 2 J_{i,0}.
  for (int i = 0; i < n; ++i) {
    const double j0 = value_Ji0(frame, i);
    worst_case2 = std::max(worst_case2, std::abs(grad_w[i].dot(b * grad_y)));
    worst_case2 = std::max(worst_case2, std::abs(grad_z[i].dot(b * grad_x)));
    worst_case2 = std::max(worst_case2, std::abs(grad_w[i].dot(b * grad_x) - 2.0 * j0));
    worst_case2 = std::max(worst_case2, std::abs(grad_z[i].dot(b * grad_y) - 2.0 * j0));
  }

  // Case 3: {Z_i, J_{j,0}} = delta_ij X, {W_i, J_{j,0}} = delta_ij Y.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double ez = (i == j) ? x_val : 0.0;
      const double ew = (i == j) ? frame.r() : 0.0;
      worst_case3 = std::max(worst_case3, std::abs(grad_z[i].dot(b * grad_j0[j]) - ez));
      worst_case3 = std::max(worst_case3, std::abs(grad_w[i].dot(b * grad_j0[j]) - ew));
    }

  // Case 4: {Z_i, Z_j} = {W_i, W_j} = 0,
  //         {Z_i, W_j} = 2 delta_ij (r . pi) - 2 J_ij.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      worst_case4 = std::max(worst_case4, std::abs(grad_z[i].dot(b * grad_z[j])));
      worst_case4 = std::max(worst_case4, std::abs(grad_w[i].dot(b * grad_w[j])));
      const double expect = 2.0 * ((i == j) ? rp : 0.0) - 2.0 * value_Jij(frame, i, j);
      worst_case4 = std::max(worst_case4, std::abs(grad_z[i].dot(b * grad_w[j]) - expect));
    }

  VerificationReport report;
  report.suite = "proof_case_relations";
  report.k = p.k;
  report.tol = tol;
  report.samples = 4;
  report.checks.push_back(
      IdentityCheck::direct("case1_defining", worst_case1 / scale, tol, n * n + 2 * n + 1));
  report.checks.push_back(IdentityCheck::direct("case2", worst_case2 / scale, tol, 4 * n));
  report.checks.push_back(IdentityCheck::direct("case3", worst_case3 / scale, tol, 2 * n * n));
  report.checks.push_back(IdentityCheck::direct("case4", worst_case4 / scale, tol, 3 * n * n));
  return report;
}

VerificationReport verify_bracket_engine(int samples, int k, std::uint64_t seed, double tol) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int n = 2 * k + 1;
  const int d = algebra_dim(k);

  double worst_basic = 0.0;
  double worst_jacobi = 0.0;
  const int jacobi_points = std::min(samples, 5);

  auto coordinate = [](int slot) {
    Observable obs;
    obs.value = [slot](const PhasePoint& q) { return q.flatten()[slot]; };
    obs.gradient = [slot](const PhasePoint& q) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(q.dim());
      g[slot] = 1.0;
      return g;
    };
    return obs;
  };

  for (int s = 0; s < samples; ++s) {
    const double mu = (0.3 + unif(rng)) * (unif(rng) < 0.5 ? -1.0 : 1.0);
    const PhasePoint p = sample_leaf_point(k, mu, rng());
    const PhaseFrame frame(p);
    const StructureConstants& c = frame.constants();

    // engine brackets of coordinate functions against the defining table
    auto engine = [&](int i, int j) {
      return poisson_bracket(coordinate(i), coordinate(j), frame);
    };
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        worst_basic = std::max(worst_basic, std::abs(engine(i, j)));
        worst_basic = std::max(worst_basic, std::abs(engine(i, n + j) - (i == j ? 1.0 : 0.0)));
        worst_basic = std::max(worst_basic, std::abs(engine(n + i, n + j) + frame.Fs()(i, j)));
      }
    for (int alpha = 0; alpha < d; ++alpha) {
      for (int j = 0; j < n; ++j) {
        worst_basic = std::max(worst_basic, std::abs(engine(2 * n + alpha, j)));
        double expect = 0.0;
        for (const auto& e : c.nonzeros())
          if (e.alpha == alpha)
            expect -= e.value * frame.potential().components[j].coeffs()[e.beta] *
                      p.xi.coeffs()[e.gamma];
        worst_basic = std::max(worst_basic, std::abs(engine(2 * n + alpha, n + j) - expect));
      }
      for (int beta = 0; beta < d; ++beta) {
        double expect = 0.0;
        for (int gamma = 0; gamma < d; ++gamma)
          expect -= c.c(alpha, beta, gamma) * p.xi.coeffs()[gamma];
        worst_basic =
            std::max(worst_basic, std::abs(engine(2 * n + alpha, 2 * n + beta) - expect));
      }
    }
    if (s < jacobi_points)
      worst_jacobi = std::max(worst_jacobi, bivector_jacobi_residual(frame));
  }

  VerificationReport report;
  report.suite = "bracket_engine";
  report.k = k;
  report.samples = samples;
  report.tol = tol;
  report.checks.push_back(
      IdentityCheck::direct("basic_relations", worst_basic, 1e-15, samples));
  report.checks.push_back(
      IdentityCheck::direct("jacobi_identity", worst_jacobi, std::max(tol, 1e-8), jacobi_points));
  return report;
}

}  // namespace micz
