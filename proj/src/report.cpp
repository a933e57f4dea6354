#include "micz/report.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <stdexcept>

namespace micz {

IdentityCheck IdentityCheck::direct(std::string name, double residual, double tol, int samples) {
  IdentityCheck c;
  c.name = std::move(name);
  c.residual = residual;
  c.tolerance = tol;
  c.samples = samples;
  c.negative_control = false;
  c.pass = residual <= tol;
  return c;
}

IdentityCheck IdentityCheck::inverted(std::string name, double residual, double threshold,
                                      int samples) {
  IdentityCheck c;
  c.name = std::move(name);
  c.residual = residual;
  c.tolerance = threshold;
  c.samples = samples;
  c.negative_control = true;
  c.pass = residual >= threshold;
  return c;
}

bool VerificationReport::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

double VerificationReport::max_residual() const {
  double worst = 0.0;
  for (const auto& c : checks)
    if (!c.negative_control) worst = std::max(worst, c.residual);
  return worst;
}

nlohmann::json VerificationReport::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["k"] = k;
  j["mu"] = mu;
  j["samples"] = samples;
  j["tol"] = tol;
  j["max_residual"] = max_residual();
  j["pass"] = pass();
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) {
    nlohmann::json jc;
    jc["name"] = c.name;
    jc["residual"] = c.residual;
    jc["tolerance"] = c.tolerance;
    jc["samples"] = c.samples;
    jc["negative_control"] = c.negative_control;
    jc["pass"] = c.pass;
    arr.push_back(jc);
  }
  j["identities"] = arr;
  return j;
}

std::string VerificationReport::to_json_string() const { return to_json().dump(2) + "\n"; }

void VerificationReport::write_json(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open report file for writing: " + path);
  out << to_json_string();
}

}  // namespace micz
