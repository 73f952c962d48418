#include <cmath>

#include <doctest.h>

#include "slowfast/errors.hpp"
#include "slowfast/fold.hpp"
#include "test_util.hpp"

using namespace slowfast;
using test::paper_params;
using test::uncoupled_params;

namespace {

// Root of F(x2) = y2 on the attracting left branch x2 < -1, by bisection.
double left_branch_root(double y2) {
  double lo = -3.0, hi = -1.0;  // F(lo) > y2 > F(hi) for y2 in (-2, 18)
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (fhn::F(mid) > y2) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

SystemDefinition flat_slow_coupling_system() {
  // f = (x1^2 - independent of y), used as the (15)-violating control.
  SystemDefinition sys;
  sys.fast_rhs = [](const State& s, const Params&) -> Vec2 {
    return {s.x1 * s.x1, -s.x2 + s.x1 * s.x1};
  };
  sys.slow_rhs = [](const State&, const Params&) -> Vec2 { return {0, 0}; };
  sys.fast_jacobian = [](const State& s, const Params&) -> Mat2 {
    return {2.0 * s.x1, 0.0, 2.0 * s.x1, -1.0};
  };
  sys.fast_slow_partials = [](const State&, const Params&) -> Mat2 {
    return {0, 0, 0, 0};
  };
  sys.second_fast_derivatives = [](const State&, const Params&) {
    SecondFastDerivs d;
    d.hess[0](0, 0) = 2.0;
    d.hess[1](0, 0) = 2.0;
    return d;
  };
  return sys;
}

}  // namespace

TEST_CASE("phi vanishes exactly at the uncoupled lower fold") {
  const auto sys = fhn_system();
  const Vec3 r = phi(sys, State{-1.0, -1.5, -2.0, -1.125}, uncoupled_params());
  CHECK(r[0] == 0.0);
  CHECK(r[1] == 0.0);
  CHECK(r[2] == 0.0);
}

TEST_CASE("phi determinant component away from the fold") {
  const auto sys = fhn_system();
  const Params p0 = uncoupled_params();
  // x1 = 0 is not a fold of oscillator 1: det = 3 F'(x2)
  const Vec3 r = phi(sys, State{0.0, -1.5, 0.0, 0.0}, p0);
  CHECK(r[2] == doctest::Approx(3.0 * fhn::dF(-1.5)));
  CHECK(std::fabs(r[2]) > 1.0);

  // small coupling perturbs the determinant at the uncoupled fold by O(nu)
  const Params p = paper_params();
  const Vec3 rc = phi(sys, State{-1.0, -1.5, -2.0, -1.125}, p);
  CHECK(rc[2] == doctest::Approx(0.0375).epsilon(1e-9));
  CHECK(std::fabs(rc[2]) > 1e-3);
  CHECK(std::fabs(rc[2]) < 0.1);
}

TEST_CASE("uncoupled fold point closed form") {
  const auto sys = fhn_system();
  const auto fp = solve_fold_point(sys, -1.125, {-1.0, -1.5, -2.0},
                                   uncoupled_params());
  CHECK(std::fabs(fp.x1_star + 1.0) < 1e-10);
  CHECK(std::fabs(fp.x2_star + 1.5) < 1e-10);
  CHECK(std::fabs(fp.y1_star + 2.0) < 1e-10);
  CHECK(std::fabs(fp.lambda + 3.75) < 1e-10);
  CHECK(std::fabs(fp.v) < 1e-12);
  CHECK(std::fabs(fp.w) < 1e-12);
  CHECK(fp.d == doctest::Approx(1.0));
  CHECK(std::fabs(fp.K - 6.0) < 1e-10);
  CHECK(fp.residual < 1e-12);
  CHECK(fp.kappa == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("upper fold branch via a shifted bracket") {
  const auto sys = fhn_system();
  FoldOptions opt;
  opt.x1_min = 0.5;
  opt.x1_max = 1.5;
  opt.seed = {1.0, -1.5, 2.0};
  const auto fp =
      solve_fold_point(sys, -1.125, opt.seed, uncoupled_params(), opt);
  CHECK(std::fabs(fp.x1_star - 1.0) < 1e-10);
  CHECK(std::fabs(fp.y1_star - 2.0) < 1e-10);
  CHECK(std::fabs(fp.K + 6.0) < 1e-10);
}

TEST_CASE("coupled fold point stays within O(nu) of the uncoupled one") {
  const auto sys = fhn_system();
  const auto fp =
      solve_fold_point(sys, -1.125, {-1.0, -1.5, -2.0}, paper_params());
  CHECK(fp.residual < 1e-12);
  CHECK(std::fabs(fp.x1_star + 1.0) < 0.01);
  CHECK(std::fabs(fp.x2_star + 1.5) < 0.01);
  CHECK(std::fabs(fp.y1_star + 2.0) < 0.01);
}

TEST_CASE("branch enforcement rejects the wrong fold") {
  const auto sys = fhn_system();
  // seed near the upper fold with the default lower-branch bracket
  CHECK_THROWS_AS(
      solve_fold_point(sys, -1.125, {1.0, -1.5, 2.0}, uncoupled_params()),
      SolverError);
}

TEST_CASE("iteration cap reports no convergence") {
  const auto sys = fhn_system();
  FoldOptions opt;
  opt.max_iter = 1;
  CHECK_THROWS_WITH_AS(
      solve_fold_point(sys, -1.125, {-1.3, -1.9, -0.5}, paper_params(), opt),
      doctest::Contains("no convergence"), SolverError);
}

TEST_CASE("uncoupled fold curve against the bisection oracle") {
  const auto sys = fhn_system();
  const auto curve = fold_curve(sys, -1.8, -0.5, 27, {-1.0, -1.5, -2.0},
                                uncoupled_params());
  REQUIRE(curve.points.size() == 27);
  for (const auto& fp : curve.points) {
    CHECK(std::fabs(fp.x1_star + 1.0) < 1e-10);
    CHECK(std::fabs(fp.y1_star + 2.0) < 1e-10);
    CHECK(std::fabs(fp.x2_star - left_branch_root(fp.y2)) < 1e-9);
  }
}

TEST_CASE("degenerate grid range gives identical points") {
  const auto sys = fhn_system();
  const auto curve =
      fold_curve(sys, -1.125, -1.125, 2, {-1.0, -1.5, -2.0}, paper_params());
  REQUIRE(curve.points.size() == 2);
  CHECK(curve.points[0].x1_star == curve.points[1].x1_star);
  CHECK(curve.points[0].x2_star == curve.points[1].x2_star);
  CHECK(curve.points[0].y1_star == curve.points[1].y1_star);
}

TEST_CASE("coupled continuation is smooth") {
  const auto sys = fhn_system();
  const auto curve =
      fold_curve(sys, -1.3, -0.9, 41, {-1.0, -1.5, -2.0}, paper_params());
  REQUIRE(curve.points.size() == 41);
  for (const auto& fp : curve.points) CHECK(fp.residual < 1e-12);
  CHECK(curve.max_second_diff < 1e-3);
}

TEST_CASE("curve failure carries the failing y2") {
  const auto sys = fhn_system();
  // y2 below the branch edge (~ -2) has no left-branch fold point
  CHECK_THROWS_WITH_AS(
      fold_curve(sys, -1.125, -2.6, 9, {-1.0, -1.5, -2.0}, paper_params()),
      doctest::Contains("y2="), SolverError);
}

TEST_CASE("fast eigen-data at the uncoupled fold") {
  const auto sys = fhn_system();
  const auto fe = fast_eigen(sys, State{-1.0, -1.5, -2.0, -1.125},
                             uncoupled_params());
  CHECK(fe.lambda == doctest::Approx(-3.75));
  CHECK(fe.v == 0.0);
  CHECK(fe.w == 0.0);
  CHECK(fe.d == 1.0);
  CHECK(std::fabs(fe.zero_eig) < 1e-14);
}

TEST_CASE("eigenvalue identities along the coupled fold curve") {
  const auto sys = fhn_system();
  const Params p = paper_params();
  const auto curve = fold_curve(sys, -1.3, -0.9, 41, {-1.0, -1.5, -2.0}, p);
  for (const auto& fp : curve.points) {
    const State s = fp.state();
    const Mat2 a = sys.fast_jacobian(s, p);
    // trace identity: 0 + lambda = tr(A)
    CHECK(std::fabs(fp.lambda - trace2(a)) < 1e-10);
    // closed-form eigenvalue
    const double lam = fhn::dF(fp.x1_star) + fhn::dF(fp.x2_star) - p.alpha1 - p.alpha2;
    CHECK(std::fabs(fp.lambda - lam) < 1e-10);
    // eigen-residuals for (1, v) and (w, 1)
    const Vec2 rv = mul(a, {1.0, fp.v});
    CHECK(std::hypot(rv[0], rv[1]) < 1e-10);
    const Vec2 rw = mul(a, {fp.w, 1.0});
    CHECK(std::hypot(rw[0] - fp.lambda * fp.w, rw[1] - fp.lambda) < 1e-10);
  }
}

TEST_CASE("eigenvalue separation floor") {
  const auto sys = fhn_system();
  FoldOptions opt;
  opt.lambda_floor = 10.0;  // absurd floor to force the error path
  CHECK_THROWS_WITH_AS(
      fast_eigen(sys, State{-1.0, -1.5, -2.0, -1.125}, uncoupled_params(), opt),
      doctest::Contains("not separated"), SolverError);
}

TEST_CASE("simple fold diagnostics at the uncoupled lower fold") {
  const auto sys = fhn_system();
  const auto diag = simple_fold_check(sys, State{-1.0, -1.5, -2.0, -1.125},
                                      uncoupled_params());
  CHECK(diag.pass());
  CHECK(diag.lambda_margin == doctest::Approx(3.75));
  CHECK(diag.kappa == doctest::Approx(6.0));
  CHECK(diag.independence_det == doctest::Approx(1.0));
}

TEST_CASE("simple fold diagnostics reject a non-fold point") {
  const auto sys = fhn_system();
  const auto diag =
      simple_fold_check(sys, State{0.0, -1.5, 0.0, -1.125}, uncoupled_params());
  CHECK(!diag.eig_simple_stable);
  CHECK(!diag.pass());
}

TEST_CASE("simple fold diagnostics reject flat slow dependence") {
  const auto sys = flat_slow_coupling_system();
  const auto diag = simple_fold_check(sys, State{0.0, 0.0, 0.0, 0.0}, Params{});
  CHECK(diag.eig_simple_stable);  // eigenvalues {0, -1}
  CHECK(!diag.fy_independent);
  CHECK(!diag.pass());
}

TEST_CASE("fold tangent vanishes without coupling and matches differences") {
  const auto sys = fhn_system();
  {
    const auto fp = solve_fold_point(sys, -1.125, {-1.0, -1.5, -2.0},
                                     uncoupled_params());
    const Vec3 t = fold_tangent(sys, fp, uncoupled_params());
    CHECK(t[0] == 0.0);
    CHECK(std::fabs(t[2]) < 1e-14);   // dy1*/dy2 = 0 exactly at nu = 0
    CHECK(t[1] == doctest::Approx(1.0 / fhn::dF(-1.5)).epsilon(1e-10));
  }
  {
    const Params p = paper_params();
    const auto fp = solve_fold_point(sys, -1.125, {-1.0, -1.5, -2.0}, p);
    const Vec3 t = fold_tangent(sys, fp, p);
    const double h = 1e-5;
    const auto fp_p = solve_fold_point(sys, -1.125 + h,
                                       {fp.x1_star, fp.x2_star, fp.y1_star}, p);
    const auto fp_m = solve_fold_point(sys, -1.125 - h,
                                       {fp.x1_star, fp.x2_star, fp.y1_star}, p);
    CHECK(std::fabs(t[0] - (fp_p.x1_star - fp_m.x1_star) / (2 * h)) < 1e-8);
    CHECK(std::fabs(t[1] - (fp_p.x2_star - fp_m.x2_star) / (2 * h)) < 1e-8);
    CHECK(std::fabs(t[2] - (fp_p.y1_star - fp_m.y1_star) / (2 * h)) < 1e-8);
  }
}

TEST_CASE("small-coupling decay rates of the fold data") {
  const auto sys = fhn_system();
  double fold_err[3], k_err[3], t3[3];
  const double nus[3] = {1e-2, 1e-3, 1e-4};
  for (int i = 0; i < 3; ++i) {
    Params p = uncoupled_params();
    p.alpha1 = p.alpha2 = p.beta1 = p.beta2 = nus[i];
    const auto fp = solve_fold_point(sys, -1.125, {-1.0, -1.5, -2.0}, p);
    fold_err[i] = std::max({std::fabs(fp.x1_star + 1.0),
                            std::fabs(fp.x2_star + 1.5),
                            std::fabs(fp.y1_star + 2.0)});
    k_err[i] = std::fabs(fp.K - 6.0);
    t3[i] = std::fabs(fold_tangent(sys, fp, p)[2]);
    // K stays within the coarse O(nu) envelope of F'' at the solved point
    CHECK(std::fabs(fp.K - fhn::d2F(fp.x1_star)) <= 1.0 * nus[i]);
  }
  for (int i = 0; i + 1 < 3; ++i) {
    CHECK(fold_err[i] / fold_err[i + 1] > 5.0);
    CHECK(fold_err[i] / fold_err[i + 1] < 20.0);
    CHECK(k_err[i] / k_err[i + 1] > 5.0);
    CHECK(k_err[i] / k_err[i + 1] < 20.0);
    CHECK(t3[i] / t3[i + 1] > 5.0);
    CHECK(t3[i] / t3[i + 1] < 20.0);
  }
}
