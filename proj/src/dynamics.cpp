#include "micz/dynamics.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace micz {

void IntegratorConfig::validate() const {
  if (rel_tol <= 0.0 || abs_tol <= 0.0 || max_step <= 0.0 || q_min <= 0.0 ||
      sample_interval <= 0.0 || max_steps <= 0 || initial_step < 0.0)
    throw std::invalid_argument("integrator configuration entries must be positive");
  if (t_end == 0.0) throw std::invalid_argument("t_end must be nonzero");
}

std::string halt_reason_name(HaltReason reason) {
  switch (reason) {
    case HaltReason::Completed: return "completed";
    case HaltReason::ChartExit: return "chart_exit";
    case HaltReason::Collision: return "collision";
    case HaltReason::StepUnderflow: return "step_underflow";
    case HaltReason::NonFinite: return "non_finite";
    case HaltReason::MaxSteps: return "max_steps";
  }
  return "unknown";
}

double DriftSummary::max() const { return std::max({H, L, A, Q, xi_norm}); }

double hamiltonian(const PhasePoint& p) {
  p.validate();
  const double r = p.r();
  return 0.5 * p.pi.squaredNorm() + 0.5 * casimir_Q(p.xi) / (r * r) - 1.0 / r;
}

Eigen::MatrixXd angular_momentum(const PhasePoint& p) {
  p.validate();
  const int n = p.n();
  const double r2 = p.x.squaredNorm();
  Eigen::MatrixXd l = r2 * field_scalar(p.x, p.xi);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) l(i, j) += p.x[i] * p.pi[j] - p.x[j] * p.pi[i];
  return l;
}

Eigen::VectorXd lenz_vector(const PhasePoint& p) {
  p.validate();
  const double r = p.r();
  const double pi2 = p.pi.squaredNorm();
  const double rp = p.x.dot(p.pi);
  const Eigen::MatrixXd fs = field_scalar(p.x, p.xi);
  return -pi2 * p.x + rp * p.pi - r * r * (fs * p.pi) + p.x / r;
}

Eigen::VectorXd lenz_vector_interior(const PhasePoint& p) {
  const Eigen::MatrixXd l = angular_momentum(p);
  // (pi _| L)_i = pi_j L_ji = (L^T pi)_i
  return l.transpose() * p.pi + p.x / p.r();
}

Eigen::VectorXd PhaseDerivative::flatten() const {
  Eigen::VectorXd z(dx.size() + dpi.size() + dxi.size());
  z << dx, dpi, dxi;
  return z;
}

PhaseDerivative eom_rhs(const PhasePoint& p, const StructureConstants& c, double q_min) {
  const int n = p.n();
  const double r = p.r();
  const double q = chart_q(p.x);
  if (q < q_min) throw ChartSingularityError(q, q_min);
  const double qcas = casimir_Q(p.xi);

  const GaugePotential pot = gauge_potential(p.x, p.k, q_min);
  const Eigen::MatrixXd fs = field_scalar(field_strength(p.x, p.k, q_min), p.xi);

  PhaseDerivative d;
  d.dx = p.pi;
  // pi_i' = -x_i/r^3 + Q x_i/r^4 + pi_j F_ji
  d.dpi = (-1.0 / (r * r * r) + qcas / (r * r * r * r)) * p.x + fs.transpose() * p.pi;
  // T_alpha' = -C^gamma_{alpha beta} (pi . A^beta) T_gamma
  Eigen::VectorXd pia = Eigen::VectorXd::Zero(algebra_dim(p.k));
  for (int j = 0; j < n; ++j) pia += p.pi[j] * pot.components[j].coeffs();
  d.dxi = Eigen::VectorXd::Zero(algebra_dim(p.k));
  const Eigen::VectorXd& xi = p.xi.coeffs();
  for (const auto& e : c.nonzeros()) d.dxi[e.alpha] -= e.value * pia[e.beta] * xi[e.gamma];
  return d;
}

PhaseDerivative eom_rhs(const PhasePoint& p) { return eom_rhs(p, StructureConstants(p.k)); }

double kepler_period(double h_value) {
  if (h_value >= 0.0) throw std::invalid_argument("period is defined for bound orbits (H < 0)");
  return 2.0 * M_PI * std::pow(-2.0 * h_value, -1.5);
}

double energy_identity_residual(const PhasePoint& p) {
  const double h = hamiltonian(p);
  const double l2 = 0.5 * angular_momentum(p).squaredNorm();
  const double mu2 = p.k * casimir_Q(p.xi);
  const double denom = l2 - mu2;
  if (denom <= 1e-9 * std::max(1.0, l2)) return std::numeric_limits<double>::quiet_NaN();
  const double a2 = lenz_vector(p).squaredNorm();
  return std::abs(h + (1.0 - a2) / (2.0 * denom)) / std::max(1.0, std::abs(h));
}

namespace {

double wedge_norm_squared(const Eigen::VectorXd& x, const Eigen::VectorXd& pi) {
  const double xp = x.dot(pi);
  return x.squaredNorm() * pi.squaredNorm() - xp * xp;
}

double energy_residual_from(double h, double l2, double mu2, double a2) {
  if (l2 - mu2 <= 1e-9 * std::max(1.0, l2)) return std::numeric_limits<double>::quiet_NaN();
  return std::abs(h + (1.0 - a2) / (2.0 * (l2 - mu2))) / std::max(1.0, std::abs(h));
}

DiagnosticsSample make_diagnostics(double t, const PhasePoint& p, double q_min) {
  DiagnosticsSample s;
  const int n = p.n();
  const double r = p.x.norm();
  const double pi2 = p.pi.squaredNorm();
  const double rp = p.x.dot(p.pi);
  const Eigen::MatrixXd fs = field_scalar(field_strength(p.x, p.k, q_min), p.xi);

  s.t = t;
  s.Q = casimir_Q(p.xi);
  s.H = 0.5 * pi2 + 0.5 * s.Q / (r * r) - 1.0 / r;
  s.xi_norm = p.xi.norm();
  s.cone_res = cone_residual(p.xi);
  s.L = r * r * fs;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s.L(i, j) += p.x[i] * p.pi[j] - p.x[j] * p.pi[i];
  s.A = -pi2 * p.x + rp * p.pi - r * r * (fs * p.pi) + p.x / r;
  const double l2 = 0.5 * s.L.squaredNorm();
  s.lsq_res = std::abs(l2 - p.k * s.Q - wedge_norm_squared(p.x, p.pi)) / std::max(1.0, l2);
  s.energy_res = energy_residual_from(s.H, l2, p.k * s.Q, s.A.squaredNorm());
  return s;
}

DriftSummary compute_drift(const std::vector<DiagnosticsSample>& samples) {
  DriftSummary drift;
  if (samples.empty()) return drift;
  const DiagnosticsSample& first = samples.front();
  auto rel = [](double v, double v0) { return std::abs(v - v0) / std::max(1.0, std::abs(v0)); };
  for (const auto& s : samples) {
    drift.H = std::max(drift.H, rel(s.H, first.H));
    drift.Q = std::max(drift.Q, rel(s.Q, first.Q));
    drift.xi_norm = std::max(drift.xi_norm, rel(s.xi_norm, first.xi_norm));
    drift.L = std::max(drift.L, (s.L - first.L).cwiseAbs().maxCoeff() /
                                    std::max(1.0, first.L.cwiseAbs().maxCoeff()));
    drift.A = std::max(drift.A, (s.A - first.A).cwiseAbs().maxCoeff() /
                                    std::max(1.0, first.A.cwiseAbs().maxCoeff()));
  }
  return drift;
}

// Dormand-Prince 5(4) coefficients.
constexpr double kC2 = 1.0 / 5, kC3 = 3.0 / 10, kC4 = 4.0 / 5, kC5 = 8.0 / 9;
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                 kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kA71 = 35.0 / 384, kA73 = 500.0 / 1113, kA74 = 125.0 / 192,
                 kA75 = -2187.0 / 6784, kA76 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

constexpr double kCollisionRadius = 1e-4;

struct RhsStatus {
  bool ok = true;
  HaltReason reason = HaltReason::Completed;
  std::string detail;
};

}  // namespace

Trajectory integrate(const PhasePoint& p0, const IntegratorConfig& cfg) {
  cfg.validate();
  p0.validate(cfg.q_min);
  const int k = p0.k;
  const StructureConstants c(k);

  Trajectory traj;
  traj.k = k;

  const double direction = cfg.t_end > 0.0 ? 1.0 : -1.0;
  const double t_end = cfg.t_end;

  RhsStatus status;
  auto rhs = [&](const Eigen::VectorXd& z, Eigen::VectorXd& out) -> bool {
    PhasePoint p = PhasePoint::unflatten(k, z);
    if (!z.allFinite()) {
      status = {false, HaltReason::NonFinite, "non-finite state"};
      return false;
    }
    const double r = p.x.norm();
    if (r < kCollisionRadius) {
      status = {false, HaltReason::Collision, "r -> 0 (r = " + std::to_string(r) + ")"};
      return false;
    }
    const double q = (r + p.x[p.n() - 1]) / r;
    if (q < cfg.q_min) {
      status = {false, HaltReason::ChartExit,
                "chart guard q = " + std::to_string(q) + " < " + std::to_string(cfg.q_min)};
      return false;
    }
    traj.rhs_evaluations++;
    out = eom_rhs(p, c, cfg.q_min).flatten();
    return true;
  };

  Eigen::VectorXd y = p0.flatten();
  double t = 0.0;

  auto record = [&](double time, const Eigen::VectorXd& z) {
    PhasePoint p = PhasePoint::unflatten(k, z);
    traj.states.push_back({time, p});
    traj.diagnostics.push_back(make_diagnostics(time, p, cfg.q_min));
  };
  record(0.0, y);

  Eigen::VectorXd k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), k5(y.size()),
      k6(y.size()), k7(y.size()), ytmp(y.size()), ynew(y.size()), yerr(y.size());

  if (!rhs(y, k1)) {
    traj.halt = status.reason;
    traj.halt_detail = status.detail;
    traj.t_final = t;
    traj.drift = compute_drift(traj.diagnostics);
    return traj;
  }

  double h = cfg.initial_step;
  if (h == 0.0) {
    const double ynorm = std::max(1.0, y.cwiseAbs().maxCoeff());
    const double fnorm = std::max(1e-8, k1.cwiseAbs().maxCoeff());
    h = std::min(cfg.max_step, 1e-2 * ynorm / fnorm);
  }
  h = std::min(h, cfg.max_step) * direction;

  double next_sample = cfg.sample_interval * direction;
  bool done = false;

  while (!done) {
    if (traj.steps_accepted + traj.steps_rejected >= cfg.max_steps) {
      traj.halt = HaltReason::MaxSteps;
      traj.halt_detail = "step budget exhausted";
      break;
    }
    // Land exactly on the next sample time and on t_end.
    double target = next_sample;
    if (direction > 0 ? (t_end < target) : (t_end > target)) target = t_end;
    if (direction > 0 ? (t + h >= target) : (t + h <= target)) h = target - t;
    if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(t))) {
      const double r_now = PhasePoint::unflatten(k, y).x.norm();
      traj.halt = r_now < 10.0 * kCollisionRadius ? HaltReason::Collision
                                                  : HaltReason::StepUnderflow;
      traj.halt_detail = "step size underflow at t = " + std::to_string(t);
      break;
    }

    bool stage_ok = true;
    ytmp = y + h * kA21 * k1;
    stage_ok = stage_ok && rhs(ytmp, k2);
    if (stage_ok) {
      ytmp = y + h * (kA31 * k1 + kA32 * k2);
      stage_ok = rhs(ytmp, k3);
    }
    if (stage_ok) {
      ytmp = y + h * (kA41 * k1 + kA42 * k2 + kA43 * k3);
      stage_ok = rhs(ytmp, k4);
    }
    if (stage_ok) {
      ytmp = y + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4);
      stage_ok = rhs(ytmp, k5);
    }
    if (stage_ok) {
      ytmp = y + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5);
      stage_ok = rhs(ytmp, k6);
    }
    if (stage_ok) {
      ynew = y + h * (kA71 * k1 + kA73 * k3 + kA74 * k4 + kA75 * k5 + kA76 * k6);
      stage_ok = rhs(ynew, k7);
    }
    if (!stage_ok) {
      traj.halt = status.reason;
      traj.halt_detail = status.detail;
      break;
    }

    yerr = h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);
    double err = 0.0;
    for (int i = 0; i < y.size(); ++i) {
      const double sk = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err += (yerr[i] / sk) * (yerr[i] / sk);
    }
    err = std::sqrt(err / y.size());

    if (err <= 1.0) {
      t += h;
      y = ynew;
      k1 = k7;  // first-same-as-last
      traj.steps_accepted++;
      const bool at_sample = std::abs(t - next_sample) <= 1e-12 * std::max(1.0, std::abs(t));
      const bool at_end = std::abs(t - t_end) <= 1e-12 * std::max(1.0, std::abs(t_end));
      if (at_sample || at_end) record(t, y);
      if (at_sample) next_sample += cfg.sample_interval * direction;
      if (at_end) {
        traj.halt = HaltReason::Completed;
        done = true;
      }
      const double grow = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
      h *= std::clamp(grow, 0.2, 5.0);
      if (std::abs(h) > cfg.max_step) h = cfg.max_step * direction;
    } else {
      traj.steps_rejected++;
      const double shrink = 0.9 * std::pow(err, -0.2);
      h *= std::clamp(shrink, 0.2, 1.0);
    }
  }

  if (traj.halt != HaltReason::Completed && !traj.states.empty()) {
    // keep the last good state for post-mortem output
    if (traj.states.back().t != t) record(t, y);
  }
  traj.t_final = t;
  traj.drift = compute_drift(traj.diagnostics);
  return traj;
}

EnergyIdentityResult energy_identity(const Trajectory& traj) {
  EnergyIdentityResult res;
  for (const auto& s : traj.diagnostics) {
    if (std::isnan(s.energy_res)) {
      res.skipped++;
      continue;
    }
    res.residuals.push_back(s.energy_res);
    res.max_residual = std::max(res.max_residual, s.energy_res);
  }
  return res;
}

ConicFitResult conic_fit(const Trajectory& traj) {
  constexpr int kMinSamples = 12;
  if (static_cast<int>(traj.states.size()) < kMinSamples)
    throw std::invalid_argument("conic fit needs at least " + std::to_string(kMinSamples) +
                                " samples");
  const int m = static_cast<int>(traj.states.size());
  const int n = traj.states.front().p.n();

  Eigen::MatrixXd pos(m, n);
  for (int i = 0; i < m; ++i) pos.row(i) = traj.states[i].p.x;
  const Eigen::RowVectorXd centroid = pos.colwise().mean();
  Eigen::MatrixXd centered = pos.rowwise() - centroid;
  const double spread = centered.rowwise().norm().mean();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::MatrixXd basis = svd.matrixV().leftCols(2);

  const Eigen::MatrixXd uv = centered * basis;                    // in-plane coordinates
  const Eigen::MatrixXd residual = centered - uv * basis.transpose();
  ConicFitResult fit;
  fit.samples = m;
  fit.plane_residual = std::sqrt(residual.squaredNorm() / m) / std::max(1.0, spread);

  // General conic a u^2 + b uv + c v^2 + d u + e v + f = 0 via the smallest
  // singular direction of the design matrix.
  Eigen::MatrixXd design(m, 6);
  for (int i = 0; i < m; ++i) {
    const double u = uv(i, 0), v = uv(i, 1);
    design.row(i) << u * u, u * v, v * v, u, v, 1.0;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> dsvd(design, Eigen::ComputeThinV);
  const Eigen::VectorXd coef = dsvd.matrixV().col(5);
  const double design_scale = design.cwiseAbs().maxCoeff();
  fit.conic_residual =
      std::sqrt((design * coef).squaredNorm() / m) / std::max(1.0, design_scale);

  // Eccentricity from the conic invariants: after centering the equation is
  // l1 u'^2 + l2 v'^2 = kappa with kappa = -det3/det2.
  const double a = coef[0], bq = coef[1], cq = coef[2];
  Eigen::Matrix2d quad;
  quad << a, bq / 2.0, bq / 2.0, cq;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(quad);
  const double l1 = es.eigenvalues()[0], l2 = es.eigenvalues()[1];
  Eigen::Matrix3d full;
  full << a, bq / 2.0, coef[3] / 2.0, bq / 2.0, cq, coef[4] / 2.0, coef[3] / 2.0, coef[4] / 2.0,
      coef[5];
  const double det2 = quad.determinant();
  if (std::abs(det2) < 1e-12 * std::max(1.0, quad.squaredNorm())) {
    fit.eccentricity = 1.0;  // parabolic branch
  } else {
    const double kappa = -full.determinant() / det2;
    if (det2 > 0.0) {
      // ellipse: semi-axes^2 are kappa / eigenvalues
      const double s1 = kappa / l1, s2 = kappa / l2;
      const double lo = std::min(s1, s2), hi = std::max(s1, s2);
      fit.eccentricity = hi > 0.0 ? std::sqrt(1.0 - lo / hi) : 0.0;
    } else {
      // hyperbola: the transverse eigenvalue shares the sign of kappa
      const double lt = (l1 * kappa > 0.0) ? l1 : l2;
      const double lo_mag = (l1 * kappa > 0.0) ? std::abs(l2) : std::abs(l1);
      fit.eccentricity = std::sqrt(1.0 + std::abs(lt) / lo_mag);
    }
  }

  const double h0 = traj.diagnostics.empty() ? 0.0 : traj.diagnostics.front().H;
  if (h0 < -1e-10)
    fit.classification = "ellipse";
  else if (h0 > 1e-10)
    fit.classification = "hyperbola";
  else
    fit.classification = "parabola";
  return fit;
}

namespace {

void append_double(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  line += buf;
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  if (traj.states.empty()) return;
  const PhasePoint& first = traj.states.front().p;
  const int n = first.n();
  const int d = algebra_dim(first.k);

  std::string header = "t";
  for (int i = 1; i <= n; ++i) header += ",x_" + std::to_string(i);
  for (int i = 1; i <= n; ++i) header += ",pi_" + std::to_string(i);
  for (int i = 1; i <= d; ++i) header += ",T_" + std::to_string(i);
  header += ",H,Q,xi_norm,cone_res,lsq_res,energy_res";
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) header += ",L_" + std::to_string(i) + "_" + std::to_string(j);
  for (int i = 1; i <= n; ++i) header += ",A_" + std::to_string(i);
  out << header << "\n";

  for (std::size_t s = 0; s < traj.states.size(); ++s) {
    const PhasePoint& p = traj.states[s].p;
    const DiagnosticsSample& diag = traj.diagnostics[s];
    std::string line;
    append_double(line, traj.states[s].t);
    auto push = [&line](double v) {
      line += ',';
      append_double(line, v);
    };
    for (int i = 0; i < n; ++i) push(p.x[i]);
    for (int i = 0; i < n; ++i) push(p.pi[i]);
    for (int i = 0; i < d; ++i) push(p.xi.coeffs()[i]);
    push(diag.H);
    push(diag.Q);
    push(diag.xi_norm);
    push(diag.cone_res);
    push(diag.lsq_res);
    push(diag.energy_res);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) push(diag.L(i, j));
    for (int i = 0; i < n; ++i) push(diag.A[i]);
    out << line << "\n";
  }
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trajectory file for writing: " + path);
  write_trajectory_csv(traj, out);
}

}  // namespace micz
