// Command-line surface: verification suites, trajectory simulation, and
// cone-point sampling with machine-readable outputs.

#include "micz/dynamics.hpp"
#include "micz/manifest.hpp"
#include "micz/poisson.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitHalted = 3;

struct RunConfig {
  int k = 1;
  double mu = 0.0;
  std::uint64_t seed = 0;
  int samples = 100;
  int n_points = 10;
  double tol = 1e-8;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double periods = 10.0;
  double t_end = 0.0;  // 0 -> derive from periods
  double drift_tol = 1e-6;
  double sample_interval = 0.0;  // 0 -> t_end / 512
  double q_min = micz::kDefaultChartGuard;
  std::string out;
  std::string format = "csv";
  std::string preset;
  bool negative_control = false;
  bool pre_rotate = false;
  std::vector<double> x0, pi0, xi0;
};

void apply_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--config", "cannot read config file: " + path);
  json j;
  in >> j;
  auto get = [&j](const char* key, auto& slot) {
    if (j.contains(key)) slot = j.at(key).template get<std::decay_t<decltype(slot)>>();
  };
  get("k", cfg.k);
  get("mu", cfg.mu);
  get("seed", cfg.seed);
  get("samples", cfg.samples);
  get("n", cfg.n_points);
  get("tol", cfg.tol);
  get("rel_tol", cfg.rel_tol);
  get("abs_tol", cfg.abs_tol);
  get("periods", cfg.periods);
  get("t_end", cfg.t_end);
  get("drift_tol", cfg.drift_tol);
  get("sample_interval", cfg.sample_interval);
  get("q_min", cfg.q_min);
  get("out", cfg.out);
  get("format", cfg.format);
  get("preset", cfg.preset);
  get("negative_control", cfg.negative_control);
  get("pre_rotate", cfg.pre_rotate);
  get("x0", cfg.x0);
  get("pi0", cfg.pi0);
  get("xi0", cfg.xi0);
}

json config_json(const RunConfig& cfg) {
  json j;
  j["k"] = cfg.k;
  j["mu"] = cfg.mu;
  j["seed"] = cfg.seed;
  j["samples"] = cfg.samples;
  j["n"] = cfg.n_points;
  j["tol"] = cfg.tol;
  j["rel_tol"] = cfg.rel_tol;
  j["abs_tol"] = cfg.abs_tol;
  j["periods"] = cfg.periods;
  j["t_end"] = cfg.t_end;
  j["drift_tol"] = cfg.drift_tol;
  j["sample_interval"] = cfg.sample_interval;
  j["q_min"] = cfg.q_min;
  j["format"] = cfg.format;
  j["preset"] = cfg.preset;
  j["negative_control"] = cfg.negative_control;
  j["pre_rotate"] = cfg.pre_rotate;
  j["x0"] = cfg.x0;
  j["pi0"] = cfg.pi0;
  j["xi0"] = cfg.xi0;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
}

std::string output_base(const std::string& path) {
  const auto dot = path.find_last_of('.');
  const auto slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
  return path.substr(0, dot);
}

// Rotation carrying the plane spanned by x0 and pi0 onto span(e_1, e_2),
// where the chart guard is identically 1.  Radial data just maps x0 to e_1.
Eigen::MatrixXd plane_to_equator_rotation(const Eigen::VectorXd& x0,
                                          const Eigen::VectorXd& pi0) {
  const int n = static_cast<int>(x0.size());
  const Eigen::VectorXd u = x0.normalized();
  Eigen::VectorXd v = pi0 - pi0.dot(u) * u;
  if (v.norm() < 1e-12) {
    // pick any direction orthogonal to u
    v = Eigen::VectorXd::Unit(n, std::abs(u[0]) > 0.9 ? 1 : 0);
    v -= v.dot(u) * u;
  }
  v.normalize();

  // complete {u, v} to an orthonormal basis and map it onto the standard one
  Eigen::MatrixXd basis(n, n);
  basis.col(0) = u;
  basis.col(1) = v;
  int col = 2;
  for (int i = 0; i < n && col < n; ++i) {
    Eigen::VectorXd cand = Eigen::VectorXd::Unit(n, i);
    for (int j = 0; j < col; ++j) cand -= cand.dot(basis.col(j)) * basis.col(j);
    if (cand.norm() > 1e-6) basis.col(col++) = cand.normalized();
  }
  if (col != n) throw std::runtime_error("failed to complete the rotation basis");
  Eigen::MatrixXd rot = basis.transpose();
  if (rot.determinant() < 0.0) rot.row(n - 1) *= -1.0;
  return rot;
}

int cmd_verify(const RunConfig& cfg) {
  const std::string out_dir = cfg.out.empty() ? "." : cfg.out;
  std::filesystem::create_directories(out_dir);

  if (cfg.negative_control && cfg.k < 2) {
    std::cerr << "error: negative controls need k >= 2 (the k=1 dual is all cone)\n";
    return kExitUsage;
  }

  std::vector<micz::VerificationReport> reports;
  if (cfg.negative_control) {
    // off-cone behaviour: the monopole suite carries the id4 control, and the
    // relation suites must visibly fail at off-cone points
    reports.push_back(micz::verify_monopole_identities(cfg.samples, cfg.k, cfg.seed, cfg.tol));
    std::mt19937_64 rng(cfg.seed + 1);
    const int points = std::clamp(cfg.samples / 10, 1, 20);
    micz::VerificationReport bracket, quadratic;
    for (int i = 0; i < points; ++i) {
      micz::PhasePoint p = micz::sample_leaf_point(cfg.k, 0.0, rng());
      p.xi = micz::sample_off_cone(cfg.k, rng());
      micz::VerificationReport rb = micz::check_bracket_relations(p, cfg.tol, true);
      micz::VerificationReport rq = micz::check_quadratic_relations(p, cfg.tol, true);
      if (i == 0) {
        bracket = rb;
        quadratic = rq;
      } else {
        // keep the weakest violation across points
        for (std::size_t c = 0; c < rb.checks.size(); ++c)
          if (rb.checks[c].residual < bracket.checks[c].residual) bracket.checks[c] = rb.checks[c];
        for (std::size_t c = 0; c < rq.checks.size(); ++c)
          if (rq.checks[c].residual < quadratic.checks[c].residual)
            quadratic.checks[c] = rq.checks[c];
      }
    }
    bracket.samples = points;
    quadratic.samples = points;
    reports.push_back(bracket);
    reports.push_back(quadratic);
  } else {
    reports.push_back(micz::verify_monopole_identities(cfg.samples, cfg.k, cfg.seed, cfg.tol));
    reports.push_back(micz::verify_bracket_engine(
        std::clamp(cfg.samples / 4, 1, 100), cfg.k, cfg.seed + 1, cfg.tol));

    const int points = std::clamp(cfg.samples / 10, 1, 20);
    std::mt19937_64 rng(cfg.seed + 2);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    micz::VerificationReport bracket, quadratic, covariance, cases;
    for (int i = 0; i < points; ++i) {
      double mu = cfg.mu;
      if (mu == 0.0 && i > 0) mu = (0.3 + unif(rng)) * (i % 2 == 0 ? 1.0 : -1.0);
      const micz::PhasePoint p = micz::sample_leaf_point(cfg.k, mu, rng());
      micz::VerificationReport rb = micz::check_bracket_relations(p, cfg.tol);
      micz::VerificationReport rq = micz::check_quadratic_relations(p, cfg.tol);
      micz::VerificationReport rc = micz::check_covariance_relations(p, cfg.tol);
      micz::VerificationReport rp = micz::check_proof_case_relations(p, cfg.tol);
      auto merge = [i](micz::VerificationReport& into, const micz::VerificationReport& from) {
        if (i == 0) {
          into = from;
          return;
        }
        for (std::size_t c = 0; c < from.checks.size(); ++c)
          if (from.checks[c].residual > into.checks[c].residual) {
            into.checks[c] = from.checks[c];
          }
      };
      merge(bracket, rb);
      merge(quadratic, rq);
      merge(covariance, rc);
      merge(cases, rp);
    }
    bracket.samples = quadratic.samples = covariance.samples = cases.samples = points;
    reports.push_back(bracket);
    reports.push_back(quadratic);
    reports.push_back(covariance);
    reports.push_back(cases);
  }

  bool all_pass = true;
  for (auto& report : reports) {
    report.k = cfg.k;
    report.mu = cfg.mu;
    report.tol = cfg.tol;
    const std::string path =
        out_dir + "/verify_" + report.suite + "_k" + std::to_string(cfg.k) + ".json";
    report.write_json(path);
    std::printf("%-24s k=%d  max_residual=%.3e  %s  -> %s\n", report.suite.c_str(), cfg.k,
                report.max_residual(), report.pass() ? "pass" : "FAIL", path.c_str());
    all_pass = all_pass && report.pass();
  }
  return all_pass ? kExitOk : kExitCheckFailed;
}

int cmd_simulate(const RunConfig& cfg) {
  const int n = 2 * cfg.k + 1;
  const int d = micz::algebra_dim(cfg.k);

  // Resolve initial data.
  Eigen::VectorXd x0, pi0;
  micz::AlgElement xi0 = micz::AlgElement::zero(cfg.k);
  bool xi_explicit = false;
  if (!cfg.xi0.empty()) {
    if (static_cast<int>(cfg.xi0.size()) != d) {
      std::cerr << "error: --xi0 needs " << d << " coefficients, got " << cfg.xi0.size() << "\n";
      return kExitUsage;
    }
    xi0 = micz::AlgElement(cfg.k, Eigen::Map<const Eigen::VectorXd>(cfg.xi0.data(), d));
    xi_explicit = true;
  }

  if (cfg.preset == "circular") {
    x0 = Eigen::VectorXd::Zero(n);
    pi0 = Eigen::VectorXd::Zero(n);
    x0[0] = 1.0;
    pi0[1] = 1.0;
    if (!xi_explicit && cfg.mu != 0.0)
      xi0 = micz::sample_orbit_point(cfg.k, cfg.mu, cfg.seed).xi;
  } else if (!cfg.preset.empty()) {
    std::cerr << "error: unknown preset '" << cfg.preset << "' (available: circular)\n";
    return kExitUsage;
  } else if (!cfg.x0.empty() || !cfg.pi0.empty()) {
    if (static_cast<int>(cfg.x0.size()) != n || static_cast<int>(cfg.pi0.size()) != n) {
      std::cerr << "error: --x0 and --pi0 both need " << n << " components (got " << cfg.x0.size()
                << " and " << cfg.pi0.size() << ")\n";
      return kExitUsage;
    }
    x0 = Eigen::Map<const Eigen::VectorXd>(cfg.x0.data(), n);
    pi0 = Eigen::Map<const Eigen::VectorXd>(cfg.pi0.data(), n);
    if (!xi_explicit) xi0 = micz::sample_orbit_point(cfg.k, cfg.mu, cfg.seed).xi;
  } else {
    // bound-orbit sampler: random chart direction, momentum scaled until bound
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.9, 1.3);
    Eigen::VectorXd dir(n);
    do {
      for (int i = 0; i < n; ++i) dir[i] = gauss(rng);
      dir.normalize();
    } while (1.0 + dir[n - 1] < 0.3);
    x0 = unif(rng) * dir;
    pi0.resize(n);
    for (int i = 0; i < n; ++i) pi0[i] = gauss(rng);
    if (!xi_explicit) xi0 = micz::sample_orbit_point(cfg.k, cfg.mu, rng()).xi;
    const double q = micz::casimir_Q(xi0);
    const double r = x0.norm();
    // shrink pi until H < -0.05 (always possible when Q/2r^2 < 1/r)
    for (int guard = 0; guard < 60; ++guard) {
      const double h = 0.5 * pi0.squaredNorm() + 0.5 * q / (r * r) - 1.0 / r;
      if (h < -0.05) break;
      pi0 *= 0.8;
    }
  }

  if (cfg.pre_rotate) {
    const Eigen::MatrixXd rot = plane_to_equator_rotation(x0, pi0);
    x0 = rot * x0;
    pi0 = rot * pi0;
  }

  micz::PhasePoint p0(cfg.k, x0, pi0, xi0);
  try {
    p0.validate(cfg.q_min);
  } catch (const std::exception& e) {
    std::cerr << "error: initial state invalid: " << e.what() << "\n";
    return kExitUsage;
  }

  const double h0 = micz::hamiltonian(p0);
  double t_end = cfg.t_end;
  if (t_end == 0.0) {
    if (h0 >= 0.0) {
      std::cerr << "error: H = " << h0 << " >= 0 is unbound; give --t-end explicitly\n";
      return kExitUsage;
    }
    t_end = cfg.periods * micz::kepler_period(h0);
  }

  micz::IntegratorConfig icfg;
  icfg.rel_tol = cfg.rel_tol;
  icfg.abs_tol = cfg.abs_tol;
  icfg.q_min = cfg.q_min;
  icfg.t_end = t_end;
  icfg.sample_interval =
      cfg.sample_interval > 0.0 ? cfg.sample_interval : std::abs(t_end) / 512.0;

  const micz::Trajectory traj = micz::integrate(p0, icfg);

  const std::string out_path = cfg.out.empty()
                                   ? (cfg.format == "json" ? "trajectory.json" : "trajectory.csv")
                                   : cfg.out;
  if (cfg.format == "csv") {
    micz::write_trajectory_csv(traj, out_path);
  } else {
    json jt;
    jt["k"] = cfg.k;
    json rows = json::array();
    for (std::size_t s = 0; s < traj.states.size(); ++s) {
      const auto& st = traj.states[s];
      const auto& diag = traj.diagnostics[s];
      json row;
      row["t"] = st.t;
      row["x"] = std::vector<double>(st.p.x.data(), st.p.x.data() + n);
      row["pi"] = std::vector<double>(st.p.pi.data(), st.p.pi.data() + n);
      row["T"] = std::vector<double>(st.p.xi.coeffs().data(), st.p.xi.coeffs().data() + d);
      row["H"] = diag.H;
      row["Q"] = diag.Q;
      row["xi_norm"] = diag.xi_norm;
      row["cone_res"] = diag.cone_res;
      row["lsq_res"] = diag.lsq_res;
      row["energy_res"] =
          std::isnan(diag.energy_res) ? json(nullptr) : json(diag.energy_res);
      rows.push_back(row);
    }
    jt["states"] = rows;
    write_text(out_path, jt.dump(2) + "\n");
  }

  const micz::EnergyIdentityResult energy = micz::energy_identity(traj);
  const bool drift_ok = traj.drift.max() <= cfg.drift_tol;

  json summary;
  {
    json manifest;
    manifest["command"] = "simulate";
    manifest["k"] = cfg.k;
    manifest["mu"] = cfg.mu;
    manifest["seed"] = cfg.seed;
    manifest["config"] = config_json(cfg);
    json inputs;
    inputs["config"] = config_json(cfg);
    const Eigen::VectorXd z0 = p0.flatten();
    inputs["initial_state"] = std::vector<double>(z0.data(), z0.data() + z0.size());
    manifest["input_hash"] = micz::git_blob_sha1(inputs.dump());
    summary["manifest"] = manifest;
  }
  summary["halt"] = {{"reason", micz::halt_reason_name(traj.halt)},
                     {"detail", traj.halt_detail},
                     {"t_final", traj.t_final}};
  summary["drift"] = {{"H", traj.drift.H},     {"L", traj.drift.L},
                      {"A", traj.drift.A},     {"Q", traj.drift.Q},
                      {"xi_norm", traj.drift.xi_norm}, {"max", traj.drift.max()},
                      {"tolerance", cfg.drift_tol},    {"pass", drift_ok}};
  summary["energy_identity"] = {{"max_residual", energy.max_residual},
                                {"samples", static_cast<int>(energy.residuals.size())},
                                {"skipped", energy.skipped}};
  summary["steps"] = {{"accepted", traj.steps_accepted},
                      {"rejected", traj.steps_rejected},
                      {"rhs_evaluations", traj.rhs_evaluations},
                      {"samples", static_cast<int>(traj.states.size())}};
  summary["initial"] = {{"H", h0}, {"Q", micz::casimir_Q(p0.xi)}, {"t_end", t_end}};
  if (traj.states.size() >= 12 && traj.halt == micz::HaltReason::Completed) {
    try {
      const micz::ConicFitResult fit = micz::conic_fit(traj);
      summary["conic_fit"] = {{"plane_residual", fit.plane_residual},
                              {"conic_residual", fit.conic_residual},
                              {"eccentricity", fit.eccentricity},
                              {"classification", fit.classification},
                              {"samples", fit.samples}};
    } catch (const std::exception&) {
      // exploratory; a degenerate track is not an error
    }
  }

  const std::string summary_path = output_base(out_path) + ".summary.json";
  write_text(summary_path, summary.dump(2) + "\n");

  std::printf("halt=%s t_final=%.6g drift_max=%.3e energy_residual=%.3e -> %s, %s\n",
              micz::halt_reason_name(traj.halt).c_str(), traj.t_final, traj.drift.max(),
              energy.max_residual, out_path.c_str(), summary_path.c_str());

  if (traj.halt != micz::HaltReason::Completed) {
    std::cerr << "halted: " << micz::halt_reason_name(traj.halt) << ": " << traj.halt_detail
              << "\n";
    return kExitHalted;
  }
  return drift_ok ? kExitOk : kExitCheckFailed;
}

int cmd_sample(const RunConfig& cfg) {
  json out;
  out["k"] = cfg.k;
  out["mu"] = cfg.mu;
  out["seed"] = cfg.seed;
  out["n"] = cfg.n_points;
  json points = json::array();
  bool all_member = true;
  for (int i = 0; i < cfg.n_points; ++i) {
    const micz::ConePoint cp = micz::sample_orbit_point(cfg.k, cfg.mu, cfg.seed + i);
    json jp;
    jp["coeffs"] = std::vector<double>(cp.xi.coeffs().data(),
                                       cp.xi.coeffs().data() + cp.xi.dim());
    jp["charge"] = cp.xi.norm() == 0.0 ? 0.0 : micz::charge(cp.xi);
    jp["Q"] = micz::casimir_Q(cp.xi);
    jp["cone_residual"] = micz::cone_residual(cp.xi);
    all_member = all_member && micz::cone_membership(cp.xi, 1e-9);
    points.push_back(jp);
  }
  out["points"] = points;
  const std::string path = cfg.out.empty() ? "cone_points.json" : cfg.out;
  write_text(path, out.dump(2) + "\n");
  std::printf("wrote %d cone point%s (mu=%g, Q=%g) -> %s\n", cfg.n_points,
              cfg.n_points == 1 ? "" : "s", cfg.mu, cfg.mu * cfg.mu / cfg.k, path.c_str());
  return all_member ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;

  // The config file seeds the defaults; explicit flags override it.
  for (int i = 1; i < argc - 1; ++i) {
    if (std::string(argv[i]) == "--config") {
      try {
        apply_config_file(argv[i + 1], cfg);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
      }
    }
  }

  CLI::App app{"generalized MICZ-Kepler dynamics: verification, simulation, cone sampling"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (flags take precedence)");

  auto add_common = [&cfg, &config_path](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file (flags take precedence)");
    cmd->add_option("--k", cfg.k, "rank parameter (dimension 2k+1)")
        ->check(CLI::Range(1, 64));
    cmd->add_option("--mu", cfg.mu, "magnetic charge");
    cmd->add_option("--seed", cfg.seed, "RNG seed");
    cmd->add_option("--out", cfg.out, "output path (directory for verify)");
    cmd->add_option("--q-min", cfg.q_min, "chart guard")->check(CLI::PositiveNumber);
  };

  CLI::App* verify = app.add_subcommand("verify", "run the identity verification suites");
  add_common(verify);
  verify->add_option("--samples", cfg.samples, "sample count")->check(CLI::PositiveNumber);
  verify->add_option("--tol", cfg.tol, "residual tolerance")->check(CLI::PositiveNumber);
  verify->add_flag("--negative-control", cfg.negative_control,
                   "check that the identities visibly fail off the cone (k >= 2)");

  CLI::App* simulate = app.add_subcommand("simulate", "integrate a trajectory");
  add_common(simulate);
  simulate->add_option("--rel-tol", cfg.rel_tol, "step control relative tolerance")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--abs-tol", cfg.abs_tol, "step control absolute tolerance")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--periods", cfg.periods, "bound-orbit periods to integrate")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--t-end", cfg.t_end, "integration time (overrides --periods)");
  simulate->add_option("--drift-tol", cfg.drift_tol, "conserved-drift contract")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--sample-interval", cfg.sample_interval, "sampling interval");
  simulate->add_option("--x0", cfg.x0, "initial position (2k+1 values)")->delimiter(',');
  simulate->add_option("--pi0", cfg.pi0, "initial momentum (2k+1 values)")->delimiter(',');
  simulate->add_option("--xi0", cfg.xi0, "initial fiber coefficients (k(2k-1) values)")
      ->delimiter(',');
  simulate->add_option("--preset", cfg.preset, "named initial data (circular)");
  simulate->add_option("--format", cfg.format, "trajectory format: csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  simulate->add_flag("--pre-rotate", cfg.pre_rotate,
                     "rotate the initial data so x0 points at the chart pole");

  CLI::App* sample = app.add_subcommand("sample", "sample points of a magnetic orbit");
  add_common(sample);
  sample->add_option("--n,--samples", cfg.n_points, "number of points")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (verify->parsed()) return cmd_verify(cfg);
    if (simulate->parsed()) return cmd_simulate(cfg);
    if (sample->parsed()) return cmd_sample(cfg);
  } catch (const micz::ChartSingularityError& e) {
    std::cerr << "halted: " << e.what() << "\n";
    return kExitHalted;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
