#include "micz/poisson.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace micz {

PhasePoint::PhasePoint(int k_, Eigen::VectorXd x_, Eigen::VectorXd pi_, AlgElement xi_)
    : k(k_), x(std::move(x_)), pi(std::move(pi_)), xi(std::move(xi_)) {
  if (k < 1) throw std::invalid_argument("rank parameter k must be >= 1");
  if (x.size() != n() || pi.size() != n())
    throw std::invalid_argument("x and pi must have dimension 2k+1 = " + std::to_string(n()));
  if (xi.k() != k) throw std::invalid_argument("xi has mismatched rank");
}

Eigen::VectorXd PhasePoint::flatten() const {
  Eigen::VectorXd z(dim());
  z.segment(0, n()) = x;
  z.segment(n(), n()) = pi;
  z.segment(2 * n(), algebra_dim(k)) = xi.coeffs();
  return z;
}

PhasePoint PhasePoint::unflatten(int k, const Eigen::VectorXd& z) {
  const int n = 2 * k + 1;
  const int d = algebra_dim(k);
  if (z.size() != 2 * n + d) throw std::invalid_argument("flattened state has wrong dimension");
  return PhasePoint(k, z.segment(0, n), z.segment(n, n), AlgElement(k, z.segment(2 * n, d)));
}

void PhasePoint::validate(double q_min) const {
  if (!x.allFinite() || !pi.allFinite() || !xi.is_finite())
    throw std::invalid_argument("phase point has non-finite entries");
  const double q = chart_q(x);  // also rejects r = 0
  if (q < q_min) throw ChartSingularityError(q, q_min);
}

Eigen::VectorXd finite_difference_gradient(const std::function<double(const PhasePoint&)>& f,
                                           const PhasePoint& p) {
  const Eigen::VectorXd z0 = p.flatten();
  Eigen::VectorXd grad(z0.size());
  for (int i = 0; i < z0.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(z0[i]));
    Eigen::VectorXd zp = z0, zm = z0;
    zp[i] += h;
    zm[i] -= h;
    grad[i] =
        (f(PhasePoint::unflatten(p.k, zp)) - f(PhasePoint::unflatten(p.k, zm))) / (2.0 * h);
  }
  return grad;
}

PhaseFrame::PhaseFrame(const PhasePoint& p, double q_min)
    : p_(p),
      c_(std::make_shared<StructureConstants>(p.k)),
      pot_(gauge_potential(p.x, p.k, q_min)),
      field_(field_strength(p.x, p.k, q_min)),
      der_(monopole_derivatives(p.x, p.k, q_min)) {
  p_.validate(q_min);
  const int n = p_.n();
  r_ = p_.x.norm();
  pi2_ = p_.pi.squaredNorm();
  rp_ = p_.x.dot(p_.pi);
  Q_ = casimir_Q(p_.xi);

  fs_ = field_scalar(field_, p_.xi);
  dfs_.assign(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(n, n));
  for (int l = 0; l < n; ++l)
    for (int j = 0; j < n; ++j)
      for (int m = j + 1; m < n; ++m) {
        const double v = der_.dF_at(l, j, m).dot(p_.xi);
        dfs_[l](j, m) = v;
        dfs_[l](m, j) = -v;
      }

  // Bivector over (x, pi, T).
  const int dim = p_.dim();
  bivector_ = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < n; ++i) {
    bivector_(i, n + i) = 1.0;
    bivector_(n + i, i) = -1.0;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) bivector_(n + i, n + j) = -fs_(i, j);
  const Eigen::VectorXd& xi = p_.xi.coeffs();
  for (const auto& e : c_->nonzeros()) {
    // {T_alpha, T_beta} = -C^gamma_{alpha beta} T_gamma
    bivector_(2 * n + e.alpha, 2 * n + e.beta) -= e.value * xi[e.gamma];
    // {T_alpha, pi_j} = -C^gamma_{alpha beta} A_j^beta T_gamma
    for (int j = 0; j < n; ++j) {
      const double w = e.value * pot_.components[j].coeffs()[e.beta] * xi[e.gamma];
      bivector_(2 * n + e.alpha, n + j) -= w;
      bivector_(n + j, 2 * n + e.alpha) += w;
    }
  }
}

Eigen::VectorXd PhaseFrame::bivector_entry_gradient(int i, int j) const {
  const int n = p_.n();
  const int d = algebra_dim(p_.k);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(p_.dim());
  if (i == j) return grad;
  if (i > j) return -bivector_entry_gradient(j, i);

  // i < j from here on; blocks are x < pi < T.
  const bool i_pi = i >= n && i < 2 * n;
  const bool j_pi = j >= n && j < 2 * n;
  const bool i_t = i >= 2 * n;
  const bool j_t = j >= 2 * n;

  if (i_pi && j_pi) {
    const int a = i - n, b = j - n;
    for (int l = 0; l < n; ++l) grad[l] = -dfs_[l](a, b);
    grad.segment(2 * n, d) = -field_.at(a, b).coeffs();
    return grad;
  }
  if (i_pi && j_t) {
    // B(pi_m, T_alpha) = +C^gamma_{alpha beta} A_m^beta T_gamma
    const int m = i - n, alpha = j - 2 * n;
    const Eigen::VectorXd& xi = p_.xi.coeffs();
    for (const auto& e : c_->nonzeros()) {
      if (e.alpha != alpha) continue;
      for (int l = 0; l < n; ++l)
        grad[l] += e.value * der_.dA_at(l, m).coeffs()[e.beta] * xi[e.gamma];
      grad[2 * n + e.gamma] += e.value * pot_.components[m].coeffs()[e.beta];
    }
    return grad;
  }
  if (i_t && j_t) {
    const int alpha = i - 2 * n, beta = j - 2 * n;
    for (int gamma = 0; gamma < d; ++gamma) grad[2 * n + gamma] = -c_->c(alpha, beta, gamma);
    return grad;
  }
  return grad;  // remaining blocks are constant
}

double poisson_bracket(const Observable& f, const Observable& g, const PhaseFrame& frame) {
  const PhasePoint& p = frame.point();
  const Eigen::VectorXd gf = f.gradient ? f.gradient(p) : finite_difference_gradient(f.value, p);
  const Eigen::VectorXd gg = g.gradient ? g.gradient(p) : finite_difference_gradient(g.value, p);
  // antisymmetrized contraction: exact zero on the diagonal
  return 0.5 * (gf.dot(frame.bivector() * gg) - gg.dot(frame.bivector() * gf));
}

double poisson_bracket(const Observable& f, const Observable& g, const PhasePoint& p) {
  return poisson_bracket(f, g, PhaseFrame(p));
}

double bivector_jacobi_residual(const PhaseFrame& frame) {
  const int dim = frame.dim();
  const Eigen::MatrixXd& b = frame.bivector();
  std::vector<Eigen::MatrixXd> db(static_cast<std::size_t>(dim),
                                  Eigen::MatrixXd::Zero(dim, dim));
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      const Eigen::VectorXd g = frame.bivector_entry_gradient(i, j);
      for (int m = 0; m < dim; ++m) {
        db[m](i, j) = g[m];
        db[m](j, i) = -g[m];
      }
    }
  double worst = 0.0;
  for (int a = 0; a < dim; ++a)
    for (int bb = a + 1; bb < dim; ++bb)
      for (int c = bb + 1; c < dim; ++c) {
        double sum = 0.0;
        double scale = 0.0;
        for (int m = 0; m < dim; ++m) {
          const double t1 = b(a, m) * db[m](bb, c);
          const double t2 = b(bb, m) * db[m](c, a);
          const double t3 = b(c, m) * db[m](a, bb);
          sum += t1 + t2 + t3;
          scale = std::max({scale, std::abs(t1), std::abs(t2), std::abs(t3)});
        }
        worst = std::max(worst, std::abs(sum) / std::max(1.0, scale));
      }
  return worst;
}

PhasePoint sample_leaf_point(int k, double mu, std::uint64_t seed, const LeafSampleOptions& opts) {
  if (k < 1) throw std::invalid_argument("rank parameter k must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int n = 2 * k + 1;

  Eigen::VectorXd dir(n);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (int i = 0; i < n; ++i) dir[i] = gauss(rng);
    dir.normalize();
    if (1.0 + dir[n - 1] >= opts.q_floor) break;
  }
  const double r = opts.r_min + (opts.r_max - opts.r_min) * unif(rng);
  Eigen::VectorXd x = r * dir;
  Eigen::VectorXd pi(n);
  for (int i = 0; i < n; ++i) pi[i] = opts.pi_scale * gauss(rng);
  const ConePoint cp = sample_orbit_point(k, mu, rng());
  return PhasePoint(k, std::move(x), std::move(pi), cp.xi);
}

AlgElement sample_off_cone(int k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("off-cone points require k >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int attempt = 0; attempt < 100; ++attempt) {
    AlgElement cartan(k);
    for (int a = 1; a <= k; ++a) {
      const double mag = a * (0.8 + 0.4 * unif(rng));
      const double sign = unif(rng) < 0.5 ? -1.0 : 1.0;
      cartan.add_coeff(2 * a - 1, 2 * a, sign * mag);
    }
    AlgElement xi = coadjoint_act(random_rotation(k, rng()), cartan);
    xi *= (0.5 + 1.5 * unif(rng)) / xi.norm() * std::sqrt(static_cast<double>(k));
    if (cone_residual(xi) >= 0.02) return xi;
  }
  throw std::logic_error("failed to sample an off-cone point");
}

}  // namespace micz
