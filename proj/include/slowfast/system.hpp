#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "slowfast/linalg.hpp"

namespace slowfast {

/// Parameters of a coupled two-slow/two-fast system. epsilon is the
/// timescale ratio; alpha* couple the fast equations, beta* the slow ones;
/// c1, c2 shift the slow nullclines.
struct Params {
  double epsilon = 0.1;
  double alpha1 = 0.01;
  double alpha2 = 0.01;
  double beta1 = 0.01;
  double beta2 = 0.01;
  double c1 = -0.99;
  double c2 = -1.5;

  // Coupling magnitude used by the small-coupling analyses.
  double nu() const;
  void validate() const;  // throws std::invalid_argument
};

struct State {
  double x1 = 0.0;
  double x2 = 0.0;
  double y1 = 0.0;
  double y2 = 0.0;
};

/// Second derivatives of the fast right-hand side, indexed so that
/// hess[i](j,k) = d2 f_i / dx_j dx_k and cross[i](j,k) = d2 f_i / dx_j dy_k.
struct SecondFastDerivs {
  std::array<Mat2, 2> hess{};
  std::array<Mat2, 2> cross{};
};

/// Evaluatable right-hand sides and analytic partials of a two-slow/two-fast
/// system in the slow-time formulation eps*x' = f(x,y), y' = g(x,y).
/// All callables must be pure functions of (State, Params).
struct SystemDefinition {
  std::function<Vec2(const State&, const Params&)> fast_rhs;
  std::function<Vec2(const State&, const Params&)> slow_rhs;
  std::function<Mat2(const State&, const Params&)> fast_jacobian;       // df/dx
  std::function<Mat2(const State&, const Params&)> fast_slow_partials;  // df/dy
  std::function<SecondFastDerivs(const State&, const Params&)> second_fast_derivatives;
};

namespace fhn {
// Cubic nonlinearity of the FitzHugh-Nagumo fast equation and derivatives.
inline double F(double z) { return -z * z * z + 3.0 * z; }
inline double dF(double z) { return -3.0 * z * z + 3.0; }
inline double d2F(double z) { return -6.0 * z; }
}  // namespace fhn

/// The coupled FitzHugh-Nagumo pair:
///   eps x1' = F(x1) - y1 + alpha1 (x2 - x1)
///   eps x2' = F(x2) - y2 + alpha2 (x1 - x2)
///   y1'     = x1 - c1 + beta1 (y2 - y1)
///   y2'     = x2 - c2 + beta2 (y1 - y2)
SystemDefinition fhn_system();

/// Assembled 4-vector (f/eps, g) in state order. Throws EvaluationError on
/// non-finite output.
std::array<double, 4> eval_full_rhs(const SystemDefinition& sys, const State& s,
                                    const Params& p);

struct FdCheckEntry {
  std::string block;  // which partial block the entry belongs to
  int i = 0;
  int j = 0;
  int k = 0;          // second index for third-order blocks, else -1
  double analytic = 0.0;
  double numeric = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
};

struct FdCheckReport {
  bool pass = true;
  double max_rel_err = 0.0;
  std::vector<FdCheckEntry> failures;
};

/// Audits the analytic partials against central finite differences of step h.
/// An entry passes when |analytic - numeric| <= max(1e-6 * scale, 1e-9).
FdCheckReport fd_check(const SystemDefinition& sys, const State& s,
                       const Params& p, double h = 1e-5);

}  // namespace slowfast
