#include <cmath>

#include <doctest.h>

#include "slowfast/errors.hpp"
#include "slowfast/system.hpp"
#include "test_util.hpp"

using namespace slowfast;
using test::paper_params;
using test::uncoupled_params;

TEST_CASE("fhn fast rhs vanishes at the origin without coupling") {
  const auto sys = fhn_system();
  Params p = uncoupled_params();
  const Vec2 f = sys.fast_rhs(State{0, 0, 0, 0}, p);
  CHECK(f[0] == 0.0);
  CHECK(f[1] == 0.0);
}

TEST_CASE("fhn fast jacobian matches the cubic derivative") {
  const auto sys = fhn_system();
  Params p = uncoupled_params();
  const Mat2 a = sys.fast_jacobian(State{-1.0, -1.5, 0, 0}, p);
  CHECK(a(0, 0) == 0.0);
  CHECK(a(0, 1) == 0.0);
  CHECK(a(1, 0) == 0.0);
  CHECK(a(1, 1) == doctest::Approx(-3.75));

  Params pc = paper_params();
  const Mat2 ac = sys.fast_jacobian(State{-1.0, -1.5, 0, 0}, pc);
  CHECK(ac(0, 0) == doctest::Approx(-0.01));
  CHECK(ac(0, 1) == doctest::Approx(0.01));
  CHECK(ac(1, 0) == doctest::Approx(0.01));
  CHECK(ac(1, 1) == doctest::Approx(-3.76));
}

TEST_CASE("fhn slow rhs direct arithmetic") {
  const auto sys = fhn_system();
  Params p = paper_params();
  const Vec2 g = sys.slow_rhs(State{-1.0, -1.5, -2.0, -1.125}, p);
  CHECK(g[0] == doctest::Approx(-0.00125).epsilon(1e-12));
  CHECK(g[1] == doctest::Approx(-0.00875).epsilon(1e-12));
}

TEST_CASE("full rhs vanishes at a decoupled equilibrium") {
  const auto sys = fhn_system();
  Params p = uncoupled_params();
  const State eq{p.c1, p.c2, fhn::F(p.c1), fhn::F(p.c2)};
  const auto rhs = eval_full_rhs(sys, eq, p);
  for (double u : rhs) CHECK(std::fabs(u) < 1e-14);
}

TEST_CASE("full rhs fast part scales with 1/epsilon") {
  const auto sys = fhn_system();
  Params p = paper_params();
  const State s{-0.9, -1.5, -2.0, -1.125};
  auto r1 = eval_full_rhs(sys, s, p);
  p.epsilon = 0.05;
  auto r2 = eval_full_rhs(sys, s, p);
  CHECK(r2[0] == doctest::Approx(2.0 * r1[0]).epsilon(1e-14));
  CHECK(r2[1] == doctest::Approx(2.0 * r1[1]).epsilon(1e-14));
  CHECK(r2[2] == r1[2]);
  CHECK(r2[3] == r1[3]);
}

TEST_CASE("full rhs matches a hand evaluation at the default start point") {
  const auto sys = fhn_system();
  const Params p = paper_params();
  const State s{-0.9, -1.5, -2.0, -1.125};
  const auto rhs = eval_full_rhs(sys, s, p);
  // independent spelling of the right-hand sides
  const double f1 = (-std::pow(-0.9, 3) + 3 * -0.9) - (-2.0) + 0.01 * (-1.5 + 0.9);
  const double f2 = (-std::pow(-1.5, 3) + 3 * -1.5) - (-1.125) + 0.01 * (-0.9 + 1.5);
  const double g1 = -0.9 + 0.99 + 0.01 * (-1.125 + 2.0);
  const double g2 = -1.5 + 1.5 + 0.01 * (-2.0 + 1.125);
  CHECK(rhs[0] == doctest::Approx(f1 / 0.1).epsilon(1e-14));
  CHECK(rhs[1] == doctest::Approx(f2 / 0.1).epsilon(1e-14));
  CHECK(rhs[2] == doctest::Approx(g1).epsilon(1e-14));
  CHECK(rhs[3] == doctest::Approx(g2).epsilon(1e-14));
  for (double u : rhs) CHECK(std::isfinite(u));
}

TEST_CASE("fd_check passes on the fhn partials at random probes") {
  const auto sys = fhn_system();
  const Params p = paper_params();
  test::Rng rng(42);
  for (int k = 0; k < 8; ++k) {
    const State s{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-3, 3),
                  rng.uniform(-3, 3)};
    const auto rep = fd_check(sys, s, p);
    CAPTURE(k);
    CHECK(rep.pass);
    CHECK(rep.max_rel_err < 1e-6);
  }
}

TEST_CASE("fd_check is exact on a linear system") {
  SystemDefinition sys;
  sys.fast_rhs = [](const State& s, const Params&) -> Vec2 {
    return {2.0 * s.x1 - s.x2 + 0.5 * s.y1, s.x1 + 3.0 * s.x2 - s.y2};
  };
  sys.slow_rhs = [](const State&, const Params&) -> Vec2 { return {0, 0}; };
  sys.fast_jacobian = [](const State&, const Params&) -> Mat2 {
    return {2.0, -1.0, 1.0, 3.0};
  };
  sys.fast_slow_partials = [](const State&, const Params&) -> Mat2 {
    return {0.5, 0.0, 0.0, -1.0};
  };
  sys.second_fast_derivatives = [](const State&, const Params&) {
    return SecondFastDerivs{};
  };
  const auto rep = fd_check(sys, State{0.3, -0.7, 1.1, 0.2}, Params{});
  CHECK(rep.pass);
  CHECK(rep.max_rel_err < 1e-9);
}

TEST_CASE("fd_check locates a corrupted partial") {
  auto sys = fhn_system();
  const auto good = sys.fast_jacobian;
  sys.fast_jacobian = [good](const State& s, const Params& p) {
    Mat2 a = good(s, p);
    a(0, 1) += 1e-3;
    return a;
  };
  const auto rep = fd_check(sys, State{-1.0, -1.5, -2.0, -1.125}, paper_params());
  CHECK(!rep.pass);
  bool located = false;
  for (const auto& f : rep.failures)
    if (f.block == "fast_jacobian" && f.i == 0 && f.j == 1) located = true;
  CHECK(located);
}

TEST_CASE("zero coupling decouples the fast jacobian") {
  const auto sys = fhn_system();
  const Params p = uncoupled_params();
  test::Rng rng(7);
  for (int k = 0; k < 16; ++k) {
    const State s{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-3, 3),
                  rng.uniform(-3, 3)};
    const Mat2 a = sys.fast_jacobian(s, p);
    CHECK(a(0, 1) == 0.0);
    CHECK(a(1, 0) == 0.0);
  }
}

TEST_CASE("the cubic nonlinearity is odd") {
  test::Rng rng(11);
  for (int k = 0; k < 32; ++k) {
    const double z = rng.uniform(-3, 3);
    CHECK(fhn::F(-z) == doctest::Approx(-fhn::F(z)).epsilon(1e-15));
  }
}

TEST_CASE("evaluations are pure (bit-identical repeats)") {
  const auto sys = fhn_system();
  const Params p = paper_params();
  const State s{-0.37, 1.21, -0.88, 0.44};
  const Vec2 f1 = sys.fast_rhs(s, p);
  const Vec2 f2 = sys.fast_rhs(s, p);
  CHECK(f1[0] == f2[0]);
  CHECK(f1[1] == f2[1]);
  const auto r1 = eval_full_rhs(sys, s, p);
  const auto r2 = eval_full_rhs(sys, s, p);
  for (int i = 0; i < 4; ++i) CHECK(r1[i] == r2[i]);
}

TEST_CASE("params validation") {
  Params p = paper_params();
  p.epsilon = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = paper_params();
  CHECK_NOTHROW(p.validate());
  CHECK(p.nu() == doctest::Approx(0.01));
}
