#include "slowfast/system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "slowfast/errors.hpp"

namespace slowfast {

double Params::nu() const {
  return std::max(std::max(alpha1, alpha2), std::max(beta1, beta2));
}

void Params::validate() const {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("params: epsilon must be > 0");
  if (!(nu() >= 0.0))
    throw std::invalid_argument("params: max coupling must be >= 0");
  for (double u : {epsilon, alpha1, alpha2, beta1, beta2, c1, c2})
    if (!std::isfinite(u))
      throw std::invalid_argument("params: non-finite parameter");
}

SystemDefinition fhn_system() {
  SystemDefinition def;
  def.fast_rhs = [](const State& s, const Params& p) -> Vec2 {
    return {fhn::F(s.x1) - s.y1 + p.alpha1 * (s.x2 - s.x1),
            fhn::F(s.x2) - s.y2 + p.alpha2 * (s.x1 - s.x2)};
  };
  def.slow_rhs = [](const State& s, const Params& p) -> Vec2 {
    return {s.x1 - p.c1 + p.beta1 * (s.y2 - s.y1),
            s.x2 - p.c2 + p.beta2 * (s.y1 - s.y2)};
  };
  def.fast_jacobian = [](const State& s, const Params& p) -> Mat2 {
    return {fhn::dF(s.x1) - p.alpha1, p.alpha1,
            p.alpha2, fhn::dF(s.x2) - p.alpha2};
  };
  def.fast_slow_partials = [](const State&, const Params&) -> Mat2 {
    return {-1.0, 0.0, 0.0, -1.0};
  };
  def.second_fast_derivatives = [](const State& s, const Params&) {
    SecondFastDerivs d;  // couplings are linear, so only the cubic contributes
    d.hess[0](0, 0) = fhn::d2F(s.x1);
    d.hess[1](1, 1) = fhn::d2F(s.x2);
    return d;
  };
  return def;
}

std::array<double, 4> eval_full_rhs(const SystemDefinition& sys, const State& s,
                                    const Params& p) {
  if (!(p.epsilon > 0.0))
    throw std::invalid_argument("eval_full_rhs: epsilon must be > 0");
  const Vec2 f = sys.fast_rhs(s, p);
  const Vec2 g = sys.slow_rhs(s, p);
  const std::array<double, 4> out{f[0] / p.epsilon, f[1] / p.epsilon, g[0], g[1]};
  for (double u : out) {
    if (!std::isfinite(u)) {
      std::ostringstream msg;
      msg << "evaluation overflow at state (" << s.x1 << ", " << s.x2 << ", "
          << s.y1 << ", " << s.y2 << ")";
      throw EvaluationError(msg.str());
    }
  }
  return out;
}

namespace {

State shifted(const State& s, int coord, double h) {
  State t = s;
  switch (coord) {
    case 0: t.x1 += h; break;
    case 1: t.x2 += h; break;
    case 2: t.y1 += h; break;
    default: t.y2 += h; break;
  }
  return t;
}

void check_entry(FdCheckReport& rep, const char* block, int i, int j, int k,
                 double analytic, double numeric) {
  const double abs_err = std::fabs(analytic - numeric);
  const double scale = std::max(std::fabs(analytic), std::fabs(numeric));
  const double rel = scale > 0.0 ? abs_err / scale : 0.0;
  const bool ok = abs_err <= std::max(1e-6 * scale, 1e-9);
  if (abs_err > 1e-9) rep.max_rel_err = std::max(rep.max_rel_err, rel);
  if (!ok) {
    rep.pass = false;
    rep.failures.push_back({block, i, j, k, analytic, numeric, abs_err, rel});
  }
}

}  // namespace

FdCheckReport fd_check(const SystemDefinition& sys, const State& s,
                       const Params& p, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd_check: step must be > 0");
  FdCheckReport rep;

  const Mat2 jac = sys.fast_jacobian(s, p);
  const Mat2 fy = sys.fast_slow_partials(s, p);
  const SecondFastDerivs d2 = sys.second_fast_derivatives(s, p);

  // First-order blocks against differences of fast_rhs.
  for (int j = 0; j < 4; ++j) {
    const Vec2 fp = sys.fast_rhs(shifted(s, j, h), p);
    const Vec2 fm = sys.fast_rhs(shifted(s, j, -h), p);
    for (int i = 0; i < 2; ++i) {
      const double num = (fp[i] - fm[i]) / (2.0 * h);
      if (j < 2)
        check_entry(rep, "fast_jacobian", i, j, -1, jac(i, j), num);
      else
        check_entry(rep, "fast_slow_partials", i, j - 2, -1, fy(i, j - 2), num);
    }
  }

  // Second-order blocks against differences of the analytic Jacobian.
  for (int k = 0; k < 4; ++k) {
    const Mat2 jp = sys.fast_jacobian(shifted(s, k, h), p);
    const Mat2 jm = sys.fast_jacobian(shifted(s, k, -h), p);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const double num = (jp(i, j) - jm(i, j)) / (2.0 * h);
        if (k < 2)
          check_entry(rep, "hessian", i, j, k, d2.hess[i](j, k), num);
        else
          check_entry(rep, "cross", i, j, k - 2, d2.cross[i](j, k - 2), num);
      }
    }
  }
  return rep;
}

}  // namespace slowfast
