#pragma once

// Scaled Ermakov control system for harmonic-trap expansion.
//
// State (x1, x2) = (b, db/dt) and control u = omega^2 / omega0^2, with time
// measured in units of 1/omega0:
//
//   x1' = x2
//   x2' = -u x1 + 1 / x1^3
//
// The transfer starts at (1, 0) with u = 1 and ends at (gamma, 0) with
// u = 1/gamma^4.

#include <json.hpp>

namespace trapcool {

/// One expansion instance. Construct through make(); the boundary controls
/// are derived and cannot be set independently.
class ProblemSpec {
 public:
  /// Throws InvalidSpecError unless v1 > 0, v2 >= 1 and gamma >= 1.
  /// gamma == 1 is the degenerate "already there" instance.
  static ProblemSpec make(double v1, double v2, double gamma);

  double v1() const noexcept { return v1_; }
  double v2() const noexcept { return v2_; }
  double gamma() const noexcept { return gamma_; }
  double u_initial() const noexcept { return 1.0; }
  double u_final() const noexcept { return u_final_; }

  /// Copy with a different upper bound, used by v2 sweeps.
  ProblemSpec with_v2(double v2) const { return make(v1_, v2, gamma_); }

  bool operator==(const ProblemSpec&) const = default;

 private:
  ProblemSpec(double v1, double v2, double gamma);

  double v1_;
  double v2_;
  double gamma_;
  double u_final_;
};

/// Phase point of the scaled system.
struct State {
  double x1 = 1.0;
  double x2 = 0.0;

  bool operator==(const State&) const = default;
};

/// Time derivative (dx1/dt, dx2/dt).
struct StateRate {
  double dx1 = 0.0;
  double dx2 = 0.0;
};

/// Right-hand side of the scaled system. Throws DomainError if x1 <= 0.
StateRate dynamics(const State& s, double u);

/// c = x2^2 + u x1^2 + 1/x1^2, conserved along constant-u flow.
double segment_invariant(const State& s, double u);

/// Average energy of mode n in units of hbar*omega0: (2n+1) c / 4.
double mode_energy(double c, unsigned n);

/// Quintic reference scaling b(s), s = t/t_f in [0, 1], with b(0) = 1,
/// b(1) = gamma and vanishing first and second derivatives at both ends.
/// Throws RangeError if s is outside [0, 1].
double ansatz_scaling(double s, double gamma);

/// b(s), b'(s), b''(s) of the quintic, derivatives taken in s.
struct AnsatzDerivatives {
  double b;
  double db;
  double d2b;
};
AnsatzDerivatives ansatz_derivatives(double s, double gamma);

/// Control reproducing the quintic through the Ermakov equation over a
/// fixed duration t_f: u(s) = 1/b^4 - b''(s) / (t_f^2 b).
double ansatz_control(double s, double t_f, double gamma);

nlohmann::json spec_to_json(const ProblemSpec& spec);

/// Parses {"v1","v2","gamma"}; unknown or missing keys throw InvalidSpecError.
ProblemSpec spec_from_json(const nlohmann::json& j);

}  // namespace trapcool
