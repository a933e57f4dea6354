#include "micz/monopole.hpp"

#include <cmath>
#include <string>

namespace micz {

ChartSingularityError::ChartSingularityError(double q, double q_min)
    : std::runtime_error("chart singularity: q = " + std::to_string(q) + " < q_min = " +
                         std::to_string(q_min)),
      q_(q),
      q_min_(q_min) {}

double chart_q(const Eigen::VectorXd& x) {
  if (!x.allFinite()) throw std::invalid_argument("position has non-finite entries");
  const double r = x.norm();
  if (r == 0.0) throw std::invalid_argument("position must be nonzero");
  return (r + x[x.size() - 1]) / r;
}

namespace {

void require_chart(const Eigen::VectorXd& x, int k, double q_min) {
  if (k < 1) throw std::invalid_argument("rank parameter k must be >= 1");
  if (x.size() != 2 * k + 1)
    throw std::invalid_argument("position must have dimension 2k+1 = " +
                                std::to_string(2 * k + 1) + ", got " + std::to_string(x.size()));
  const double q = chart_q(x);
  if (q < q_min) throw ChartSingularityError(q, q_min);
}

// u_b = sum_a x_a gamma_ab for b = 1..2k (n-th slot unused, zero).
std::vector<AlgElement> radial_gamma(const Eigen::VectorXd& x, int k) {
  const int n = 2 * k + 1;
  std::vector<AlgElement> u(static_cast<std::size_t>(n), AlgElement::zero(k));
  for (int b = 1; b <= 2 * k; ++b)
    for (int a = 1; a <= 2 * k; ++a)
      if (a != b) u[b - 1].add_coeff(a, b, x[a - 1]);
  return u;
}

}  // namespace

GaugePotential gauge_potential(const Eigen::VectorXd& x, int k, double q_min) {
  require_chart(x, k, q_min);
  const int n = 2 * k + 1;
  const double r = x.norm();
  const double s = 1.0 / (r * (r + x[n - 1]));
  GaugePotential pot;
  pot.k = k;
  pot.x = x;
  pot.components = radial_gamma(x, k);
  for (int b = 0; b < n - 1; ++b) pot.components[b] *= -s;
  return pot;
}

FieldStrength field_strength(const Eigen::VectorXd& x, int k, double q_min) {
  const GaugePotential pot = gauge_potential(x, k, q_min);
  const int n = 2 * k + 1;
  const double r = x.norm();
  const double inv_r2 = 1.0 / (r * r);
  const double inv_r3 = inv_r2 / r;

  FieldStrength f;
  f.k = k;
  f.x = x;
  f.components.assign(static_cast<std::size_t>(n) * n, AlgElement::zero(k));
  const std::vector<AlgElement> u = radial_gamma(x, k);

  auto slot = [n](int j, int m) { return static_cast<std::size_t>(j) * n + m; };
  for (int b = 0; b < n - 1; ++b) {
    AlgElement fnb = u[b];
    fnb *= inv_r3;
    f.components[slot(n - 1, b)] = fnb;
    fnb *= -1.0;
    f.components[slot(b, n - 1)] = fnb;
  }
  for (int a = 0; a < n - 1; ++a)
    for (int b = a + 1; b < n - 1; ++b) {
      AlgElement fab = AlgElement::basis(a + 1, b + 1, k);
      fab += x[a] * pot.components[b];
      fab -= x[b] * pot.components[a];
      fab *= -inv_r2;
      f.components[slot(a, b)] = fab;
      fab *= -1.0;
      f.components[slot(b, a)] = fab;
    }
  return f;
}

MonopoleDerivatives monopole_derivatives(const Eigen::VectorXd& x, int k, double q_min) {
  const GaugePotential pot = gauge_potential(x, k, q_min);
  const int n = 2 * k + 1;
  const double r = x.norm();
  const double s = 1.0 / (r * (r + x[n - 1]));
  const double inv_r2 = 1.0 / (r * r);
  const std::vector<AlgElement> u = radial_gamma(x, k);

  MonopoleDerivatives der;
  der.k = k;
  der.x = x;
  der.dA.assign(static_cast<std::size_t>(n) * n, AlgElement::zero(k));
  der.dF.assign(static_cast<std::size_t>(n) * n * n, AlgElement::zero(k));

  auto a_slot = [n](int l, int b) { return static_cast<std::size_t>(l) * n + b; };
  auto f_slot = [n](int l, int j, int m) { return (static_cast<std::size_t>(l) * n + j) * n + m; };

  // dA_b/dx_l = -(d_l s) u_b - s gamma_{l+1,b+1}, with
  // d_l s = -s^2 ((2r + x_n) x_l / r + r delta_{ln}).
  for (int l = 0; l < n; ++l) {
    const double ds = -s * s * ((2.0 * r + x[n - 1]) * x[l] / r + (l == n - 1 ? r : 0.0));
    for (int b = 0; b < n - 1; ++b) {
      AlgElement d = u[b];
      d *= -ds;
      if (l < n - 1 && l != b) d.add_coeff(l + 1, b + 1, -s);
      der.dA[a_slot(l, b)] = d;
    }
  }

  for (int l = 0; l < n; ++l) {
    const double xl = x[l];
    // F_nb = u_b / r^3.
    for (int b = 0; b < n - 1; ++b) {
      AlgElement d = u[b];
      d *= -3.0 * xl / std::pow(r, 5);
      if (l < n - 1 && l != b) d.add_coeff(l + 1, b + 1, 1.0 / (r * r * r));
      der.dF[f_slot(l, n - 1, b)] = d;
      d *= -1.0;
      der.dF[f_slot(l, b, n - 1)] = d;
    }
    // F_ab = -(gamma_ab + x_a A_b - x_b A_a) / r^2.
    for (int a = 0; a < n - 1; ++a)
      for (int b = a + 1; b < n - 1; ++b) {
        AlgElement core = AlgElement::basis(a + 1, b + 1, k);
        core += x[a] * pot.components[b];
        core -= x[b] * pot.components[a];
        AlgElement d = core;
        d *= 2.0 * xl * inv_r2 * inv_r2;
        AlgElement inner = x[a] * der.dA[a_slot(l, b)] - x[b] * der.dA[a_slot(l, a)];
        if (l == a) inner += pot.components[b];
        if (l == b) inner -= pot.components[a];
        inner *= -inv_r2;
        d += inner;
        der.dF[f_slot(l, a, b)] = d;
        d *= -1.0;
        der.dF[f_slot(l, b, a)] = d;
      }
  }
  return der;
}

Eigen::MatrixXd field_scalar(const FieldStrength& f, const AlgElement& xi) {
  if (f.k != xi.k()) throw std::invalid_argument("rank mismatch between field and xi");
  const int n = 2 * f.k + 1;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (int m = j + 1; m < n; ++m) {
      const double v = f.at(j, m).dot(xi);
      out(j, m) = v;
      out(m, j) = -v;
    }
  return out;
}

Eigen::MatrixXd field_scalar(const Eigen::VectorXd& x, const AlgElement& xi, double q_min) {
  return field_scalar(field_strength(x, xi.k(), q_min), xi);
}

AlgElement gauge_commutator(const AlgElement& a, const AlgElement& b) {
  AlgElement out = alg_bracket(a, b);
  out *= -1.0;
  return out;
}

std::vector<AlgElement> covariant_derivative_F(const Eigen::VectorXd& x, int k, double q_min) {
  const GaugePotential pot = gauge_potential(x, k, q_min);
  const FieldStrength f = field_strength(x, k, q_min);
  const MonopoleDerivatives der = monopole_derivatives(x, k, q_min);
  const int n = 2 * k + 1;
  std::vector<AlgElement> nabla(static_cast<std::size_t>(n) * n * n, AlgElement::zero(k));
  auto f_slot = [n](int l, int j, int m) { return (static_cast<std::size_t>(l) * n + j) * n + m; };
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int m = j + 1; m < n; ++m) {
        AlgElement v = der.dF_at(l, j, m);
        v += gauge_commutator(pot.components[l], f.at(j, m));
        nabla[f_slot(l, j, m)] = v;
        v *= -1.0;
        nabla[f_slot(l, m, j)] = v;
      }
  return nabla;
}

std::vector<AlgElement> covariant_derivative_F_rhs(const Eigen::VectorXd& x, int k, double q_min) {
  const FieldStrength f = field_strength(x, k, q_min);
  const int n = 2 * k + 1;
  const double inv_r2 = 1.0 / x.squaredNorm();
  std::vector<AlgElement> nabla(static_cast<std::size_t>(n) * n * n, AlgElement::zero(k));
  auto f_slot = [n](int l, int j, int m) { return (static_cast<std::size_t>(l) * n + j) * n + m; };
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int m = 0; m < n; ++m) {
        if (j == m) continue;
        AlgElement v = x[j] * f.at(l, m);
        v *= -1.0;
        v -= x[m] * f.at(j, l);
        v -= 2.0 * x[l] * f.at(j, m);
        v *= inv_r2;
        nabla[f_slot(l, j, m)] = v;
      }
  return nabla;
}

std::vector<AlgElement> covariant_derivative_F_fd(const Eigen::VectorXd& x, int k, double q_min,
                                                  double h_rel) {
  const GaugePotential pot = gauge_potential(x, k, q_min);
  const int n = 2 * k + 1;
  const double h = h_rel * x.norm();
  std::vector<AlgElement> nabla(static_cast<std::size_t>(n) * n * n, AlgElement::zero(k));
  auto f_slot = [n](int l, int j, int m) { return (static_cast<std::size_t>(l) * n + j) * n + m; };
  const FieldStrength f0 = field_strength(x, k, q_min);
  for (int l = 0; l < n; ++l) {
    Eigen::VectorXd xp = x, xm = x;
    xp[l] += h;
    xm[l] -= h;
    const FieldStrength fp = field_strength(xp, k, q_min);
    const FieldStrength fm = field_strength(xm, k, q_min);
    for (int j = 0; j < n; ++j)
      for (int m = 0; m < n; ++m) {
        if (j == m) continue;
        AlgElement v = fp.at(j, m) - fm.at(j, m);
        v *= 1.0 / (2.0 * h);
        v += gauge_commutator(pot.components[l], f0.at(j, m));
        nabla[f_slot(l, j, m)] = v;
      }
  }
  return nabla;
}

}  // namespace micz
