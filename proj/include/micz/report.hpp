#pragma once

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <vector>

namespace micz {

/// One verified identity family: worst residual over the sampled inputs
/// against its tolerance.  A negative-control check passes when the
/// residual stays ABOVE the tolerance (the identity must visibly fail).
struct IdentityCheck {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  int samples = 0;
  bool negative_control = false;
  bool pass = false;

  static IdentityCheck direct(std::string name, double residual, double tol, int samples);
  static IdentityCheck inverted(std::string name, double residual, double threshold, int samples);
};

struct VerificationReport {
  std::string suite;
  int k = 0;
  double mu = 0.0;
  int samples = 0;
  double tol = 0.0;
  std::vector<IdentityCheck> checks;

  bool pass() const;
  /// Worst residual over the direct (non-inverted) checks.
  double max_residual() const;

  nlohmann::json to_json() const;
  std::string to_json_string() const;
  void write_json(const std::string& path) const;
};

}  // namespace micz
