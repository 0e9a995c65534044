#include "trapcool/core_model.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "trapcool/errors.hpp"

namespace trapcool {

ProblemSpec::ProblemSpec(double v1, double v2, double gamma)
    : v1_(v1), v2_(v2), gamma_(gamma), u_final_(1.0 / std::pow(gamma, 4)) {}

ProblemSpec ProblemSpec::make(double v1, double v2, double gamma) {
  if (!std::isfinite(v1) || !(v1 > 0.0)) {
    throw InvalidSpecError("v1 must be a finite positive number");
  }
  if (!std::isfinite(v2) || !(v2 >= 1.0)) {
    throw InvalidSpecError("v2 must be finite and >= u(0) = 1");
  }
  if (!std::isfinite(gamma) || !(gamma >= 1.0)) {
    throw InvalidSpecError("gamma must be finite and >= 1");
  }
  return ProblemSpec(v1, v2, gamma);
}

namespace {

void require_positive(const State& s) {
  if (!(s.x1 > 0.0)) {
    std::ostringstream msg;
    msg << "state escaped admissible region: x1 = " << s.x1;
    throw DomainError(msg.str());
  }
}

}  // namespace

StateRate dynamics(const State& s, double u) {
  require_positive(s);
  const double x1_cubed = s.x1 * s.x1 * s.x1;
  return {s.x2, -u * s.x1 + 1.0 / x1_cubed};
}

double segment_invariant(const State& s, double u) {
  require_positive(s);
  const double x1_sq = s.x1 * s.x1;
  return s.x2 * s.x2 + u * x1_sq + 1.0 / x1_sq;
}

double mode_energy(double c, unsigned n) {
  return (2.0 * n + 1.0) * c / 4.0;
}

AnsatzDerivatives ansatz_derivatives(double s, double gamma) {
  if (!(s >= 0.0 && s <= 1.0)) {
    throw RangeError("ansatz parameter s must lie in [0, 1], got " +
                     std::to_string(s));
  }
  const double a = gamma - 1.0;
  const double s2 = s * s;
  const double s3 = s2 * s;
  // b = a (6 s^5 - 15 s^4 + 10 s^3) + 1, factored so the endpoint
  // derivatives come out as exact zeros.
  const double b = a * s3 * (6.0 * s2 - 15.0 * s + 10.0) + 1.0;
  const double db = 30.0 * a * s2 * (s - 1.0) * (s - 1.0);
  const double d2b = 60.0 * a * s * (s - 1.0) * (2.0 * s - 1.0);
  return {b, db, d2b};
}

double ansatz_scaling(double s, double gamma) {
  return ansatz_derivatives(s, gamma).b;
}

double ansatz_control(double s, double t_f, double gamma) {
  if (!(t_f > 0.0)) {
    throw RangeError("ansatz duration t_f must be positive");
  }
  const auto [b, db, d2b] = ansatz_derivatives(s, gamma);
  const double b2 = b * b;
  return 1.0 / (b2 * b2) - d2b / (t_f * t_f * b);
}

nlohmann::json spec_to_json(const ProblemSpec& spec) {
  return {{"v1", spec.v1()}, {"v2", spec.v2()}, {"gamma", spec.gamma()}};
}

ProblemSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw InvalidSpecError("problem spec must be a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    if (key != "v1" && key != "v2" && key != "gamma") {
      throw InvalidSpecError("unknown problem spec key '" + key + "'");
    }
    if (!value.is_number()) {
      throw InvalidSpecError("problem spec key '" + key + "' must be a number");
    }
  }
  for (const char* key : {"v1", "v2", "gamma"}) {
    if (!j.contains(key)) {
      throw InvalidSpecError(std::string("problem spec is missing '") + key +
                             "'");
    }
  }
  return ProblemSpec::make(j.at("v1").get<double>(), j.at("v2").get<double>(),
                           j.at("gamma").get<double>());
}

}  // namespace trapcool
