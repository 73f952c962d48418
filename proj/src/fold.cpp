#include "slowfast/fold.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "slowfast/errors.hpp"

namespace slowfast {

namespace {

double inf_norm3(const Vec3& r) {
  return std::max({std::fabs(r[0]), std::fabs(r[1]), std::fabs(r[2])});
}

// d(det df/dx)/dy_k via the cross partials.
double det_dy(const Mat2& a, const SecondFastDerivs& d2, int k) {
  return d2.cross[0](0, k) * a(1, 1) + a(0, 0) * d2.cross[1](1, k) -
         d2.cross[0](1, k) * a(1, 0) - a(0, 1) * d2.cross[1](0, k);
}

std::string at_y2(double y2) {
  std::ostringstream os;
  os << " at y2=" << y2;
  return os.str();
}

}  // namespace

Vec3 phi(const SystemDefinition& sys, const State& s, const Params& p) {
  const Vec2 f = sys.fast_rhs(s, p);
  return {f[0], f[1], det2(sys.fast_jacobian(s, p))};
}

Vec2 det_gradient_x(const SystemDefinition& sys, const State& s, const Params& p) {
  const Mat2 a = sys.fast_jacobian(s, p);
  const SecondFastDerivs d2 = sys.second_fast_derivatives(s, p);
  Vec2 g;
  for (int j = 0; j < 2; ++j) {
    g[j] = d2.hess[0](0, j) * a(1, 1) + a(0, 0) * d2.hess[1](1, j) -
           d2.hess[0](1, j) * a(1, 0) - a(0, 1) * d2.hess[1](0, j);
  }
  return g;
}

Mat3 phi_jacobian(const SystemDefinition& sys, const State& s, const Params& p) {
  const Mat2 a = sys.fast_jacobian(s, p);
  const Mat2 fy = sys.fast_slow_partials(s, p);
  const SecondFastDerivs d2 = sys.second_fast_derivatives(s, p);
  const Vec2 gd = det_gradient_x(sys, s, p);
  Mat3 m;
  m(0, 0) = a(0, 0); m(0, 1) = a(0, 1); m(0, 2) = fy(0, 0);
  m(1, 0) = a(1, 0); m(1, 1) = a(1, 1); m(1, 2) = fy(1, 0);
  m(2, 0) = gd[0];   m(2, 1) = gd[1];   m(2, 2) = det_dy(a, d2, 0);
  return m;
}

Vec3 phi_dy2(const SystemDefinition& sys, const State& s, const Params& p) {
  const Mat2 a = sys.fast_jacobian(s, p);
  const Mat2 fy = sys.fast_slow_partials(s, p);
  const SecondFastDerivs d2 = sys.second_fast_derivatives(s, p);
  return {fy(0, 1), fy(1, 1), det_dy(a, d2, 1)};
}

FastEigen fast_eigen(const SystemDefinition& sys, const State& s,
                     const Params& p, const FoldOptions& opt) {
  const Mat2 a = sys.fast_jacobian(s, p);
  const Eig2 e = eig2(a);
  if (!e.real)
    throw SolverError("fast eigen: complex pair, no simple fold structure");
  if (std::fabs(e.big) < opt.lambda_floor)
    throw SolverError("fast eigen: eigenvalue not separated");

  FastEigen fe;
  fe.lambda = e.big;
  fe.zero_eig = e.small;

  // Null-direction eigenvector (1, v): pick the better conditioned row.
  {
    const double den1 = a(0, 1);            // row 1: v = (mu - a00)/a01
    const double den2 = e.small - a(1, 1);  // row 2: v = a10/(mu - a11)
    fe.v = (std::fabs(den2) >= std::fabs(den1)) ? a(1, 0) / den2
                                                : (e.small - a(0, 0)) / den1;
  }
  // Stable eigenvector (w, 1).
  {
    const double den1 = e.big - a(0, 0);  // row 1: w = a01/(lambda - a00)
    const double den2 = a(1, 0);          // row 2: w = (lambda - a11)/a10
    fe.w = (std::fabs(den1) >= std::fabs(den2)) ? a(0, 1) / den1
                                                : (e.big - a(1, 1)) / den2;
  }
  fe.d = 1.0 / (1.0 - fe.v * fe.w);
  return fe;
}

FoldPoint solve_fold_point(const SystemDefinition& sys, double y2,
                           const Vec3& seed, const Params& p,
                           const FoldOptions& opt) {
  State s{seed[0], seed[1], seed[2], y2};
  Vec3 r = phi(sys, s, p);
  double rn = inf_norm3(r);

  int iter = 0;
  while (rn > opt.newton_tol) {
    if (++iter > opt.max_iter) {
      std::ostringstream msg;
      msg << "fold solve: no convergence" << at_y2(y2) << " (residual " << rn << ")";
      throw SolverError(msg.str());
    }
    Vec3 step;
    try {
      step = solve3(phi_jacobian(sys, s, p), {-r[0], -r[1], -r[2]});
    } catch (const SingularMatrixError&) {
      throw SolverError("fold solve: degenerate fold (singular Newton matrix)" + at_y2(y2));
    }
    double scale = 1.0;
    State trial;
    Vec3 rt;
    double rtn;
    for (int h = 0;; ++h) {
      trial = State{s.x1 + scale * step[0], s.x2 + scale * step[1],
                    s.y1 + scale * step[2], y2};
      rt = phi(sys, trial, p);
      rtn = inf_norm3(rt);
      if (rtn < rn || h >= opt.max_halvings) break;
      scale *= 0.5;
    }
    s = trial;
    r = rt;
    rn = rtn;
  }

  if (opt.enforce_branch &&
      (s.x1 < opt.x1_min || s.x1 > opt.x1_max || s.x2 > opt.x2_max)) {
    std::ostringstream msg;
    msg << "fold solve: wrong branch" << at_y2(y2) << " (x1=" << s.x1
        << ", x2=" << s.x2 << ")";
    throw SolverError(msg.str());
  }

  FastEigen fe = fast_eigen(sys, s, p, opt);
  if (!(fe.lambda < -opt.lambda_floor)) {
    std::ostringstream msg;
    msg << "fold solve: degenerate fold, unstable fast direction (lambda="
        << fe.lambda << ")" << at_y2(y2);
    throw SolverError(msg.str());
  }
  if (!(std::fabs(fe.v * fe.w) < 1.0))
    throw SolverError("fold solve: eigenvectors nearly parallel" + at_y2(y2));

  // Non-degeneracy margin: derivative of the critical eigenvalue along the
  // null direction, grad(det) . (1, v) / lambda.
  const Vec2 gd = det_gradient_x(sys, s, p);
  const double kappa = (gd[0] + gd[1] * fe.v) / fe.lambda;
  if (std::fabs(kappa) < opt.kappa_floor) {
    std::ostringstream msg;
    msg << "fold solve: degenerate fold (kappa=" << kappa << ")" << at_y2(y2);
    throw SolverError(msg.str());
  }

  // Curvature of the critical manifold in diagonalized coordinates: implicit
  // second derivative of the constraint f = 0 along the null direction,
  //   [lambda*(w,1) | df/dy1] (x2'', y1'') = -(P1^T H_i P1)_i,  K = y1''.
  const SecondFastDerivs d2 = sys.second_fast_derivatives(s, p);
  const Mat2 fy = sys.fast_slow_partials(s, p);
  const Vec2 p1{1.0, fe.v};
  const Vec2 q{quad_form(d2.hess[0], p1), quad_form(d2.hess[1], p1)};
  Vec2 curv;
  try {
    curv = solve2(Mat2{fe.lambda * fe.w, fy(0, 0), fe.lambda, fy(1, 0)},
                  {-q[0], -q[1]});
  } catch (const SingularMatrixError&) {
    throw SolverError("fold solve: degenerate fold (dependent f_y1)" + at_y2(y2));
  }

  FoldPoint fp;
  fp.y2 = y2;
  fp.x1_star = s.x1;
  fp.x2_star = s.x2;
  fp.y1_star = s.y1;
  fp.lambda = fe.lambda;
  fp.v = fe.v;
  fp.w = fe.w;
  fp.d = fe.d;
  fp.K = curv[1];
  fp.kappa = kappa;
  fp.residual = rn;
  return fp;
}

Vec3 fold_tangent(const SystemDefinition& sys, const FoldPoint& fp,
                  const Params& p) {
  const State s = fp.state();
  const Vec3 rhs = phi_dy2(sys, s, p);
  try {
    return solve3(phi_jacobian(sys, s, p), {-rhs[0], -rhs[1], -rhs[2]});
  } catch (const SingularMatrixError&) {
    throw SolverError("fold tangent: degenerate fold" + at_y2(fp.y2));
  }
}

FoldCurve fold_curve(const SystemDefinition& sys, double y2_min, double y2_max,
                     int n, const Vec3& seed, const Params& p,
                     const FoldOptions& opt) {
  if (n < 2) throw std::invalid_argument("fold_curve: need n >= 2");
  FoldCurve curve;
  curve.points.reserve(static_cast<std::size_t>(n));
  const double h = (y2_max - y2_min) / (n - 1);
  Vec3 cur = seed;
  for (int i = 0; i < n; ++i) {
    const double y2 = (i == n - 1) ? y2_max : y2_min + i * h;
    const FoldPoint fp = solve_fold_point(sys, y2, cur, p, opt);
    cur = {fp.x1_star, fp.x2_star, fp.y1_star};
    curve.points.push_back(fp);
  }
  for (std::size_t i = 1; i + 1 < curve.points.size(); ++i) {
    const FoldPoint& a = curve.points[i - 1];
    const FoldPoint& b = curve.points[i];
    const FoldPoint& c = curve.points[i + 1];
    curve.max_second_diff = std::max(
        {curve.max_second_diff,
         std::fabs(a.x1_star - 2.0 * b.x1_star + c.x1_star),
         std::fabs(a.x2_star - 2.0 * b.x2_star + c.x2_star),
         std::fabs(a.y1_star - 2.0 * b.y1_star + c.y1_star)});
  }
  return curve;
}

SimpleFoldDiagnostics simple_fold_check(const SystemDefinition& sys,
                                        const State& s, const Params& p,
                                        const FoldOptions& opt) {
  SimpleFoldDiagnostics diag;
  const Mat2 a = sys.fast_jacobian(s, p);
  const Eig2 e = eig2(a);

  if (!e.real) {
    diag.zero_eig_mag = std::sqrt(std::fabs(e.det));
    return diag;  // complex pair: every condition fails
  }
  diag.zero_eig_mag = std::fabs(e.small);
  diag.lambda_margin = -e.big;
  diag.eig_simple_stable =
      diag.zero_eig_mag < opt.zero_eig_tol && e.big < -opt.lambda_floor;

  FastEigen fe;
  try {
    fe = fast_eigen(sys, s, p, opt);
  } catch (const SolverError&) {
    return diag;
  }

  const Mat2 fy = sys.fast_slow_partials(s, p);
  // Independence of a df/dy column from the stable eigenvector (w, 1).
  const double d0 = fy(0, 0) - fy(1, 0) * fe.w;
  const double d1 = fy(0, 1) - fy(1, 1) * fe.w;
  diag.independence_det = std::max(std::fabs(d0), std::fabs(d1));
  diag.fy_independent = diag.independence_det > opt.indep_floor;

  const Vec2 gd = det_gradient_x(sys, s, p);
  diag.kappa = (gd[0] + gd[1] * fe.v) / fe.lambda;
  diag.kappa_nonzero = std::fabs(diag.kappa) > opt.kappa_floor;
  return diag;
}

}  // namespace slowfast
