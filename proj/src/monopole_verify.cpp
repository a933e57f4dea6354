#include "micz/monopole.hpp"
#include "micz/poisson.hpp"

#include <cmath>
#include <random>

namespace micz {

namespace {

Eigen::VectorXd random_chart_position(int k, std::mt19937_64& rng) {
  const int n = 2 * k + 1;
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.7, 1.5);
  Eigen::VectorXd dir(n);
  do {
    for (int i = 0; i < n; ++i) dir[i] = gauss(rng);
    dir.normalize();
  } while (1.0 + dir[n - 1] < 0.1);
  return unif(rng) * dir;
}

AlgElement random_cone_xi(int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double mu = (0.5 + unif(rng)) * (unif(rng) < 0.5 ? -1.0 : 1.0);
  return sample_orbit_point(k, mu, rng()).xi;
}

double max_alg_norm(const std::vector<AlgElement>& v) {
  double m = 0.0;
  for (const auto& e : v) m = std::max(m, e.max_abs());
  return m;
}

}  // namespace

VerificationReport verify_monopole_identities(int samples, int k, std::uint64_t seed, double tol) {
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  std::mt19937_64 rng(seed);
  const int n = 2 * k + 1;
  constexpr int kConePerPosition = 4;

  double transversality = 0.0;  // x.A = 0 and x.F = 0
  double field_norm = 0.0;            // r^4 sum F^2 = 2kQ
  double deriv_closed_form = 0.0;         // nabla F vs closed form
  double deriv_divergence = 0.0;      // sum_j nabla_j F_jk = 0
  double deriv_fd = 0.0;              // nabla F vs finite differences
  double field_bracket = 0.0;         // r^4 {F,F} vs projector combination
  double projector_on_cone = 0.0;            // cone points satisfy the F.F identity
  double projector_off_cone = HUGE_VAL;    // off-cone points must violate it

  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd x = random_chart_position(k, rng);
    const double r = x.norm();
    const double r2 = r * r;

    const GaugePotential pot = gauge_potential(x, k);
    const FieldStrength field = field_strength(x, k);
    const auto nabla = covariant_derivative_F(x, k);
    const auto nabla_rhs = covariant_derivative_F_rhs(x, k);
    const auto nabla_fd = covariant_derivative_F_fd(x, k);

    {
      AlgElement xa = AlgElement::zero(k);
      double term_scale = 0.0;
      for (int j = 0; j < n; ++j) {
        AlgElement t = pot.components[j];
        t *= x[j];
        term_scale = std::max(term_scale, t.max_abs());
        xa += t;
      }
      transversality =
          std::max(transversality, xa.max_abs() / std::max(1.0, term_scale));
      for (int m = 0; m < n; ++m) {
        AlgElement xf = AlgElement::zero(k);
        term_scale = 0.0;
        for (int j = 0; j < n; ++j) {
          AlgElement t = field.at(j, m);
          t *= x[j];
          term_scale = std::max(term_scale, t.max_abs());
          xf += t;
        }
        transversality =
            std::max(transversality, xf.max_abs() / std::max(1.0, term_scale));
      }
    }

    {
      const double fscale = std::max(1.0, max_alg_norm(nabla_rhs));
      double dformula = 0.0, dfd = 0.0;
      for (std::size_t t = 0; t < nabla.size(); ++t) {
        dformula = std::max(dformula, (nabla[t] - nabla_rhs[t]).max_abs());
        dfd = std::max(dfd, (nabla[t] - nabla_fd[t]).max_abs());
      }
      deriv_closed_form = std::max(deriv_closed_form, dformula / fscale);
      deriv_fd = std::max(deriv_fd, dfd / fscale);
      for (int m = 0; m < n; ++m) {
        AlgElement div = AlgElement::zero(k);
        for (int j = 0; j < n; ++j)
          if (j != m) div += nabla[(static_cast<std::size_t>(j) * n + j) * n + m];
        deriv_divergence = std::max(deriv_divergence, div.max_abs() / fscale);
      }
    }

    for (int c = 0; c < kConePerPosition; ++c) {
      const AlgElement xi = random_cone_xi(k, rng);
      const double q = casimir_Q(xi);
      const Eigen::MatrixXd fs = field_scalar(field, xi);

      field_norm = std::max(
          field_norm, std::abs(r2 * r2 * fs.squaredNorm() - 2.0 * k * q) / std::max(1.0, 2 * k * q));

      Eigen::MatrixXd e = r2 * r2 * fs.transpose() * fs;
      e -= q * (Eigen::MatrixXd::Identity(n, n) - x * x.transpose() / r2);
      projector_on_cone = std::max(projector_on_cone, e.cwiseAbs().maxCoeff() / std::max(1.0, q));
    }

    // Bracket identity, routed through the Poisson engine at an arbitrary
    // momentum: lhs = r^4 {F_jm, F_lu}, rhs built from P_uv = r^2 d_uv - x_u x_v.
    {
      std::normal_distribution<double> gauss(0.0, 1.0);
      Eigen::VectorXd pi(n);
      for (int i = 0; i < n; ++i) pi[i] = gauss(rng);
      const AlgElement xi = random_cone_xi(k, rng);
      const PhasePoint p(k, x, pi, xi);
      const PhaseFrame frame(p);
      const int d = algebra_dim(k);

      std::vector<std::pair<int, int>> fpairs;
      for (int j = 0; j < n; ++j)
        for (int m = j + 1; m < n; ++m) fpairs.emplace_back(j, m);
      Eigen::MatrixXd grads(static_cast<int>(fpairs.size()), p.dim());
      for (std::size_t t = 0; t < fpairs.size(); ++t) {
        Eigen::VectorXd g = Eigen::VectorXd::Zero(p.dim());
        for (int l = 0; l < n; ++l) g[l] = frame.dFs(l)(fpairs[t].first, fpairs[t].second);
        g.segment(2 * n, d) = frame.field().at(fpairs[t].first, fpairs[t].second).coeffs();
        grads.row(static_cast<int>(t)) = g;
      }
      const Eigen::MatrixXd brackets = grads * frame.bivector() * grads.transpose();
      auto proj = [&](int u, int v) { return r2 * (u == v ? 1.0 : 0.0) - x[u] * x[v]; };
      const Eigen::MatrixXd& fsm = frame.Fs();
      const double fsscale = std::max(1.0, r2 * r2 * fsm.cwiseAbs().maxCoeff());
      for (std::size_t s1 = 0; s1 < fpairs.size(); ++s1)
        for (std::size_t s2 = s1; s2 < fpairs.size(); ++s2) {
          const auto [j, m] = fpairs[s1];
          const auto [l, u] = fpairs[s2];
          const double lhs = r2 * r2 * brackets(static_cast<int>(s1), static_cast<int>(s2));
          const double rhs = proj(j, l) * fsm(m, u) + proj(m, u) * fsm(j, l) -
                             proj(j, u) * fsm(m, l) - proj(m, l) * fsm(j, u);
          field_bracket = std::max(field_bracket, std::abs(lhs - rhs) / fsscale);
        }
    }

    if (k >= 2) {
      const AlgElement xi = sample_off_cone(k, rng());
      const double q = casimir_Q(xi);
      const Eigen::MatrixXd fs = field_scalar(field, xi);
      Eigen::MatrixXd e = r2 * r2 * fs.transpose() * fs;
      e -= q * (Eigen::MatrixXd::Identity(n, n) - x * x.transpose() / r2);
      projector_off_cone = std::min(projector_off_cone, e.cwiseAbs().maxCoeff() / std::max(1.0, q));
    }
  }

  VerificationReport report;
  report.suite = "monopole_identities";
  report.k = k;
  report.samples = samples;
  report.tol = tol;
  report.checks.push_back(
      IdentityCheck::direct("transversality", transversality, tol, samples));
  report.checks.push_back(
      IdentityCheck::direct("field_norm", field_norm, tol, samples * kConePerPosition));
  report.checks.push_back(IdentityCheck::direct("covariant_derivative_closed_form", deriv_closed_form, tol, samples));
  report.checks.push_back(IdentityCheck::direct("covariant_divergence", deriv_divergence, tol, samples));
  report.checks.push_back(
      IdentityCheck::direct("id2_finite_difference", deriv_fd, std::max(tol, 1e-6), samples));
  report.checks.push_back(IdentityCheck::direct("field_bracket", field_bracket, tol, samples));
  report.checks.push_back(
      IdentityCheck::direct("field_square_projector", projector_on_cone, tol, samples * kConePerPosition));
  if (k >= 2)
    report.checks.push_back(
        IdentityCheck::inverted("id4_negative_control", projector_off_cone, 1e-3, samples));
  return report;
}

}  // namespace micz
