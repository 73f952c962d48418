#pragma once

#include <vector>

#include "slowfast/linalg.hpp"
#include "slowfast/system.hpp"

namespace slowfast {

struct FoldOptions {
  double newton_tol = 1e-12;
  int max_iter = 50;
  int max_halvings = 8;
  double lambda_floor = 1e-6;
  double kappa_floor = 1e-6;
  double zero_eig_tol = 1e-8;
  double indep_floor = 1e-8;

  // Branch bracket. The default selects the paper configuration: oscillator 1
  // at its lower fold, oscillator 2 on the attracting left branch.
  bool enforce_branch = true;
  double x1_min = -1.5;
  double x1_max = -0.5;
  double x2_max = -1.0;

  // Default Newton seed and the y2 it is valid for (continuation anchor).
  Vec3 seed{-1.0, -1.5, -2.0};
  double seed_y2 = -1.125;
};

/// A solved point on the fold curve together with the eigen-data of the fast
/// subsystem there. (x1_star, x2_star, y1_star) solve Phi(., y2) = 0; lambda
/// is the nonzero (stable) fast eigenvalue with eigenvector (w, 1); the zero
/// eigenvector is (1, v); d = 1/(1 - v w); K is the quadratic coefficient of
/// the critical manifold in diagonalized coordinates; kappa is the fold
/// non-degeneracy margin (directional derivative of the critical eigenvalue
/// along the null direction).
struct FoldPoint {
  double y2 = 0.0;
  double x1_star = 0.0;
  double x2_star = 0.0;
  double y1_star = 0.0;
  double lambda = 0.0;
  double v = 0.0;
  double w = 0.0;
  double d = 1.0;
  double K = 0.0;
  double kappa = 0.0;
  double residual = 0.0;

  State state() const { return {x1_star, x2_star, y1_star, y2}; }
};

/// Phi = (f1, f2, det df/dx); the fold curve is its zero set.
Vec3 phi(const SystemDefinition& sys, const State& s, const Params& p);

/// Gradient of det(df/dx) with respect to (x1, x2).
Vec2 det_gradient_x(const SystemDefinition& sys, const State& s, const Params& p);

/// Jacobian of Phi with respect to (x1, x2, y1).
Mat3 phi_jacobian(const SystemDefinition& sys, const State& s, const Params& p);

/// Partial of Phi with respect to y2.
Vec3 phi_dy2(const SystemDefinition& sys, const State& s, const Params& p);

struct FastEigen {
  double lambda = 0.0;    // nonzero (stable) eigenvalue
  double zero_eig = 0.0;  // near-zero eigenvalue, exactly 0 on the fold
  double v = 0.0;
  double w = 0.0;
  double d = 1.0;
};

/// Eigen-data of the 2x2 fast Jacobian at a point, normalized to
/// eigenvectors (1, v) and (w, 1). Throws SolverError when the nonzero
/// eigenvalue is below the separation floor or the pair is complex.
FastEigen fast_eigen(const SystemDefinition& sys, const State& s,
                     const Params& p, const FoldOptions& opt = {});

/// Damped Newton on Phi(x1, x2, y1; y2) = 0 from the given seed, followed by
/// the eigen-data and non-degeneracy computations. Throws SolverError on
/// non-convergence, branch escape or a degenerate fold.
FoldPoint solve_fold_point(const SystemDefinition& sys, double y2,
                           const Vec3& seed, const Params& p,
                           const FoldOptions& opt = {});

/// Derivative of the fold parametrization psi = (x1*, x2*, y1*) with respect
/// to y2, from the linear system M psi' = -dPhi/dy2.
Vec3 fold_tangent(const SystemDefinition& sys, const FoldPoint& fp,
                  const Params& p);

struct FoldCurve {
  std::vector<FoldPoint> points;
  double max_second_diff = 0.0;  // smoothness audit over the psi components
};

/// Continuation along a uniform y2 grid; each solve seeds from the previous
/// solution. Solver errors propagate with the failing y2 attached.
FoldCurve fold_curve(const SystemDefinition& sys, double y2_min, double y2_max,
                     int n, const Vec3& seed, const Params& p,
                     const FoldOptions& opt = {});

/// Diagnostics for the simple-fold conditions: (a) one simple zero eigenvalue
/// with the other strictly stable, (b) a df/dy column independent of the
/// stable eigenvector, (c) kappa bounded away from zero.
struct SimpleFoldDiagnostics {
  bool eig_simple_stable = false;
  bool fy_independent = false;
  bool kappa_nonzero = false;
  double lambda_margin = 0.0;     // -lambda
  double zero_eig_mag = 0.0;
  double independence_det = 0.0;  // best |det[df/dy column, (w,1)]|
  double kappa = 0.0;

  bool pass() const { return eig_simple_stable && fy_independent && kappa_nonzero; }
};

SimpleFoldDiagnostics simple_fold_check(const SystemDefinition& sys,
                                        const State& s, const Params& p,
                                        const FoldOptions& opt = {});

inline SimpleFoldDiagnostics simple_fold_check(const SystemDefinition& sys,
                                               const FoldPoint& fp,
                                               const Params& p,
                                               const FoldOptions& opt = {}) {
  return simple_fold_check(sys, fp.state(), p, opt);
}

}  // namespace slowfast
