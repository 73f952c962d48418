#include "slowfast/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "slowfast/errors.hpp"

namespace slowfast {

namespace {

std::string fmt_at(const char* what, double value) {
  std::ostringstream os;
  os << " (" << what << "=" << value << ")";
  return os.str();
}

}  // namespace

ReducedChart::ReducedChart(SystemDefinition sys, Params p, FoldOptions fopt,
                           ReducedOptions ropt)
    : sys_(std::move(sys)), p_(p), fopt_(fopt), ropt_(ropt) {
  p_.validate();
  if (!(p_.nu() < ropt_.nu_max))
    throw std::invalid_argument(
        "reduced chart: coupling exceeds the small-coupling gate nu_max" +
        fmt_at("nu", p_.nu()));
}

FoldPoint ReducedChart::fold_at(double y2) const {
  if (have_fold_ && last_fold_.y2 == y2) return last_fold_;

  Vec3 from = fopt_.seed;
  double from_y2 = fopt_.seed_y2;
  if (have_fold_) {
    from = {last_fold_.x1_star, last_fold_.x2_star, last_fold_.y1_star};
    from_y2 = last_fold_.y2;
  }
  // Walk the curve in bounded y2 increments so far-away queries stay inside
  // the Newton basin of the target branch.
  const double span = y2 - from_y2;
  int steps = std::fabs(span) > 0.25
                  ? static_cast<int>(std::ceil(std::fabs(span) / 0.25))
                  : 1;
  steps = std::min(steps, 256);
  FoldPoint fp;
  for (int k = 1; k <= steps; ++k) {
    const double yk = (k == steps) ? y2 : from_y2 + span * k / steps;
    fp = solve_fold_point(sys_, yk, from, p_, fopt_);
    from = {fp.x1_star, fp.x2_star, fp.y1_star};
  }
  last_fold_ = fp;
  have_fold_ = true;
  return fp;
}

Vec3 ReducedChart::fold_tangent_at(double y2) const {
  return fold_tangent(sys_, fold_at(y2), p_);
}

double ReducedChart::dy1star_dy2(double y2) const {
  return fold_tangent_at(y2)[2];
}

void ReducedChart::check_chart(double x1) const {
  if (!(std::fabs(x1) <= ropt_.chart_radius))
    throw ChartError("reduced chart: x1 outside the chart" + fmt_at("x1", x1));
}

State ReducedChart::manifold_point_at(const FoldPoint& fp, double x1) const {
  if (x1 == 0.0) return fp.state();

  // Unknowns u = (x2 component in the stable direction, y1 offset); the
  // constraint is f = 0 at the displaced point.
  double u0 = 0.0;
  double u1 = 0.5 * fp.K * x1 * x1;
  State s;
  auto place = [&](double a, double b) {
    s = State{fp.x1_star + x1 + fp.w * a, fp.x2_star + fp.v * x1 + a,
              fp.y1_star + b, fp.y2};
  };
  place(u0, u1);
  Vec2 r = sys_.fast_rhs(s, p_);
  double rn = std::max(std::fabs(r[0]), std::fabs(r[1]));
  for (int iter = 0; rn > fopt_.newton_tol; ++iter) {
    if (iter >= fopt_.max_iter)
      throw SolverError("manifold solve: no convergence" + fmt_at("x1", x1));
    const Mat2 a = sys_.fast_jacobian(s, p_);
    const Mat2 fy = sys_.fast_slow_partials(s, p_);
    // Columns: d f / du0 = A (w, 1), d f / du1 = df/dy1.
    Mat2 jac{a(0, 0) * fp.w + a(0, 1), fy(0, 0),
             a(1, 0) * fp.w + a(1, 1), fy(1, 0)};
    Vec2 step;
    try {
      step = solve2(jac, {-r[0], -r[1]});
    } catch (const SingularMatrixError&) {
      throw SolverError("manifold solve: singular constraint Jacobian" +
                        fmt_at("x1", x1));
    }
    double scale = 1.0;
    for (int h = 0;; ++h) {
      place(u0 + scale * step[0], u1 + scale * step[1]);
      r = sys_.fast_rhs(s, p_);
      const double rt = std::max(std::fabs(r[0]), std::fabs(r[1]));
      if (rt < rn || h >= fopt_.max_halvings) {
        u0 += scale * step[0];
        u1 += scale * step[1];
        rn = rt;
        break;
      }
      scale *= 0.5;
    }
  }
  return s;
}

State ReducedChart::manifold_point(double x1, double y2) const {
  check_chart(x1);
  return manifold_point_at(fold_at(y2), x1);
}

double ReducedChart::slope_at(const FoldPoint& fp, const State& s,
                              double x1) const {
  if (x1 == 0.0) return 0.0;  // the fold line is the locus m = 0
  const Mat2 a = sys_.fast_jacobian(s, p_);
  const Mat2 fy = sys_.fast_slow_partials(s, p_);
  // Implicit derivative of the constraint along the chart direction:
  //   [A P2 | df/dy1] (u0', y1') = -A P1.
  const Vec2 ap1{a(0, 0) + a(0, 1) * fp.v, a(1, 0) + a(1, 1) * fp.v};
  const Mat2 jac{a(0, 0) * fp.w + a(0, 1), fy(0, 0),
                 a(1, 0) * fp.w + a(1, 1), fy(1, 0)};
  Vec2 sol;
  try {
    sol = solve2(jac, {-ap1[0], -ap1[1]});
  } catch (const SingularMatrixError&) {
    throw SolverError("manifold slope: singular constraint Jacobian" +
                      fmt_at("x1", x1));
  }
  return sol[1];
}

double ReducedChart::manifold_slope(double x1, double y2) const {
  check_chart(x1);
  const FoldPoint fp = fold_at(y2);
  return slope_at(fp, manifold_point_at(fp, x1), x1);
}

Vec2 ReducedChart::g_pair(double x1, double y2) const {
  check_chart(x1);
  const FoldPoint fp = fold_at(y2);
  const double t3 = fold_tangent(sys_, fp, p_)[2];
  const State s = manifold_point_at(fp, x1);
  const Vec2 sl = sys_.slow_rhs(s, p_);
  return {sl[0] - t3 * sl[1], sl[1]};
}

double ReducedChart::g1(double x1, double y2) const { return g_pair(x1, y2)[0]; }

double ReducedChart::g2(double x1, double y2) const { return g_pair(x1, y2)[1]; }

Vec2 ReducedChart::desing_rhs(double x1, double y2) const {
  check_chart(x1);
  const FoldPoint fp = fold_at(y2);
  const double t3 = fold_tangent(sys_, fp, p_)[2];
  const State s = manifold_point_at(fp, x1);
  const Vec2 sl = sys_.slow_rhs(s, p_);
  const double m = slope_at(fp, s, x1);
  return {sl[0] - t3 * sl[1], sl[1] * m};
}

Vec2 ReducedChart::reduced_rhs(double x1, double y2) const {
  check_chart(x1);
  const FoldPoint fp = fold_at(y2);
  const double t3 = fold_tangent(sys_, fp, p_)[2];
  const State s = manifold_point_at(fp, x1);
  const Vec2 sl = sys_.slow_rhs(s, p_);
  const double m = slope_at(fp, s, x1);
  if (std::fabs(m) < 1e-12)
    throw SolverError("reduced flow: singular at the fold line" +
                      fmt_at("x1", x1));
  return {(sl[0] - t3 * sl[1]) / m, sl[1]};
}

double fhn_g1_explicit(const ReducedChart& chart, double x1, double y2) {
  const Params& p = chart.params();
  const FoldPoint fp = chart.fold_at(y2);
  const double t3 = chart.dy1star_dy2(y2);
  const double g2v = fp.x2_star + fp.v * x1 - p.c2 + p.beta2 * (fp.y1_star - y2);
  return fp.x1_star + x1 - p.c1 + p.beta1 * (y2 - fp.y1_star) - t3 * g2v;
}

double fhn_g2_explicit(const ReducedChart& chart, double x1, double y2) {
  const Params& p = chart.params();
  const FoldPoint fp = chart.fold_at(y2);
  return fp.x2_star + fp.v * x1 - p.c2 + p.beta2 * (fp.y1_star - y2);
}

const char* to_string(FoldedKind k) {
  switch (k) {
    case FoldedKind::FoldedSaddle: return "folded-saddle";
    case FoldedKind::FoldedNodeAttracting: return "folded-node-attracting";
    case FoldedKind::FoldedNodeRepelling: return "folded-node-repelling";
    case FoldedKind::FoldedFocus: return "folded-focus";
    case FoldedKind::DegenerateNearFsn: return "degenerate-near-fsn";
  }
  return "?";
}

const char* to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::Saddle: return "saddle";
    case EquilibriumKind::AttractingNode: return "attracting-node";
    case EquilibriumKind::RepellingNode: return "repelling-node";
    case EquilibriumKind::AttractingFocus: return "attracting-focus";
    case EquilibriumKind::RepellingFocus: return "repelling-focus";
    case EquilibriumKind::Degenerate: return "degenerate";
  }
  return "?";
}

namespace {

// Scalar root of fn on [lo, hi] by grid bracketing plus bisection; evaluation
// failures (fold solver off its branch) shrink the usable grid.
template <class Fn>
double bracketed_root(Fn&& fn, double lo, double hi, int grid, double tol,
                      const char* what) {
  double prev_x = 0.0, prev_f = 0.0;
  bool have_prev = false;
  double a = 0.0, b = 0.0, fa = 0.0, fb = 0.0;
  bool found = false;
  for (int i = 0; i < grid && !found; ++i) {
    const double x = lo + (hi - lo) * i / (grid - 1);
    double f;
    try {
      f = fn(x);
    } catch (const SolverError&) {
      have_prev = false;
      continue;
    }
    if (f == 0.0) return x;
    if (have_prev && prev_f * f < 0.0) {
      a = prev_x; fa = prev_f; b = x; fb = f;
      found = true;
    }
    prev_x = x; prev_f = f; have_prev = true;
  }
  if (!found) {
    std::ostringstream os;
    os << what << ": no root in bracket [" << lo << ", " << hi << "]";
    throw BracketError(os.str());
  }
  while (b - a > tol) {
    const double mid = 0.5 * (a + b);
    const double fm = fn(mid);
    if (fm == 0.0) return mid;
    if (fa * fm < 0.0) { b = mid; fb = fm; }
    else { a = mid; fa = fm; }
  }
  // Final secant sharpening inside the last interval.
  if (fb != fa) {
    const double x = a - fa * (b - a) / (fb - fa);
    if (x >= a && x <= b) return x;
  }
  return 0.5 * (a + b);
}

double folded_root_y2(const ReducedChart& chart,
                      std::optional<std::pair<double, double>> bracket) {
  const ReducedOptions& ro = chart.options();
  auto h = [&](double y2) { return chart.g1(0.0, y2); };
  const double dstep = ro.partial_step;

  if (!bracket) {
    // Newton from the chart anchor, falling back to a scan when it stalls.
    double y = chart.fold_options().seed_y2;
    double hv = h(y);
    for (int iter = 0; iter < ro.max_iter; ++iter) {
      if (std::fabs(hv) <= ro.root_tol) return y;
      const double hp = (h(y + dstep) - h(y - dstep)) / (2.0 * dstep);
      if (std::fabs(hp) < ro.dg1dy2_floor)
        throw SolverError(
            "folded singularity: degenerate, |dg1/dy2| below floor" +
            fmt_at("dg1/dy2", hp));
      double step = -hv / hp;
      double scale = 1.0;
      for (int k = 0;; ++k) {
        try {
          const double ht = h(y + scale * step);
          if (std::fabs(ht) < std::fabs(hv) || k >= 8) {
            y += scale * step;
            hv = ht;
            break;
          }
        } catch (const SolverError&) {
          // left the solvable region; shorten the step
        }
        scale *= 0.5;
        if (k >= 12) throw SolverError("folded singularity: step collapse");
      }
    }
    throw SolverError("folded singularity: no convergence of the y2 root");
  }
  return bracketed_root(h, bracket->first, bracket->second,
                        std::max(ro.bracket_grid, 9), 1e-13,
                        "folded singularity");
}

FoldedKind classify_folded(double det, double trace, double disc,
                           double degen_tol) {
  if (std::fabs(det) < degen_tol) return FoldedKind::DegenerateNearFsn;
  if (det < 0.0) return FoldedKind::FoldedSaddle;
  if (disc >= 0.0)
    return trace > 0.0 ? FoldedKind::FoldedNodeRepelling
                       : FoldedKind::FoldedNodeAttracting;
  return FoldedKind::FoldedFocus;
}

EquilibriumKind classify_equilibrium(double det, double trace, double disc,
                                     double degen_tol) {
  if (std::fabs(det) < degen_tol) return EquilibriumKind::Degenerate;
  if (det < 0.0) return EquilibriumKind::Saddle;
  if (disc >= 0.0)
    return trace > 0.0 ? EquilibriumKind::RepellingNode
                       : EquilibriumKind::AttractingNode;
  if (std::fabs(trace) < degen_tol) return EquilibriumKind::Degenerate;
  return trace > 0.0 ? EquilibriumKind::RepellingFocus
                     : EquilibriumKind::AttractingFocus;
}

}  // namespace

FoldedSingularity find_folded_singularity(
    const ReducedChart& chart,
    std::optional<std::pair<double, double>> y2_bracket) {
  const ReducedOptions& ro = chart.options();
  const double y2f = folded_root_y2(chart, y2_bracket);
  const double d = ro.partial_step;

  FoldedSingularity fs;
  fs.c1 = chart.params().c1;
  fs.y2_fold = y2f;
  fs.g1_residual = std::fabs(chart.g1(0.0, y2f));
  fs.dg1_dx1 = (chart.g1(d, y2f) - chart.g1(-d, y2f)) / (2.0 * d);
  fs.dg1_dy2 = (chart.g1(0.0, y2f + d) - chart.g1(0.0, y2f - d)) / (2.0 * d);
  if (std::fabs(fs.dg1_dy2) < ro.dg1dy2_floor)
    throw SolverError("folded singularity: degenerate, |dg1/dy2| below floor" +
                      fmt_at("dg1/dy2", fs.dg1_dy2));

  const FoldPoint fp = chart.fold_at(y2f);
  fs.K = fp.K;
  fs.g2_value = chart.g2(0.0, y2f);
  fs.jacobian = Mat2{fs.dg1_dx1, fs.dg1_dy2, 2.0 * fp.K * fs.g2_value, 0.0};

  const Eig2 e = eig2(fs.jacobian);
  fs.det = e.det;
  fs.trace = e.tr;
  fs.disc = e.disc;
  fs.eig_real = e.real;
  fs.eig_big = e.big;
  fs.eig_small = e.small;
  fs.kind = classify_folded(fs.det, fs.trace, fs.disc, ro.degen_tol);
  return fs;
}

OrdinaryEquilibrium find_ordinary_equilibrium(const ReducedChart& chart,
                                              std::optional<Vec2> seed) {
  const ReducedOptions& ro = chart.options();
  const double d = ro.partial_step;

  Vec2 u;
  if (seed) {
    u = *seed;
  } else {
    // Default seed: on the fold line at the root of g2(0, .).
    auto h2 = [&](double y2) { return chart.g2(0.0, y2); };
    double y = chart.fold_options().seed_y2;
    double hv = h2(y);
    bool ok = false;
    for (int iter = 0; iter < ro.max_iter; ++iter) {
      if (std::fabs(hv) <= ro.root_tol) { ok = true; break; }
      const double hp = (h2(y + d) - h2(y - d)) / (2.0 * d);
      if (std::fabs(hp) < 1e-12)
        throw SolverError("ordinary equilibrium: flat g2, cannot seed");
      y -= hv / hp;
      hv = h2(y);
    }
    if (!ok && std::fabs(hv) > ro.root_tol)
      throw SolverError("ordinary equilibrium: g2 seed root not found");
    u = {0.0, y};
  }

  Vec2 r = chart.g_pair(u[0], u[1]);
  double rn = std::max(std::fabs(r[0]), std::fabs(r[1]));
  for (int iter = 0; rn > ro.root_tol; ++iter) {
    if (iter >= ro.max_iter)
      throw SolverError("ordinary equilibrium: no convergence" +
                        fmt_at("residual", rn));
    const Vec2 gx_p = chart.g_pair(u[0] + d, u[1]);
    const Vec2 gx_m = chart.g_pair(u[0] - d, u[1]);
    const Vec2 gy_p = chart.g_pair(u[0], u[1] + d);
    const Vec2 gy_m = chart.g_pair(u[0], u[1] - d);
    const Mat2 jac{(gx_p[0] - gx_m[0]) / (2.0 * d), (gy_p[0] - gy_m[0]) / (2.0 * d),
                   (gx_p[1] - gx_m[1]) / (2.0 * d), (gy_p[1] - gy_m[1]) / (2.0 * d)};
    Vec2 step;
    try {
      step = solve2(jac, {-r[0], -r[1]});
    } catch (const SingularMatrixError&) {
      throw SolverError("ordinary equilibrium: singular Jacobian");
    }
    double scale = 1.0;
    for (int h = 0;; ++h) {
      const Vec2 trial{u[0] + scale * step[0], u[1] + scale * step[1]};
      if (std::fabs(trial[0]) > ro.chart_radius)
        throw ChartError("ordinary equilibrium: outside chart" +
                         fmt_at("x1", trial[0]));
      const Vec2 rt = chart.g_pair(trial[0], trial[1]);
      const double rtn = std::max(std::fabs(rt[0]), std::fabs(rt[1]));
      if (rtn < rn || h >= 8) {
        u = trial;
        r = rt;
        rn = rtn;
        break;
      }
      scale *= 0.5;
    }
  }

  OrdinaryEquilibrium eq;
  eq.c1 = chart.params().c1;
  eq.x1_e = u[0];
  eq.y2_e = u[1];
  eq.residual = rn;

  const Vec2 fx_p = chart.desing_rhs(u[0] + d, u[1]);
  const Vec2 fx_m = chart.desing_rhs(u[0] - d, u[1]);
  const Vec2 fy_p = chart.desing_rhs(u[0], u[1] + d);
  const Vec2 fy_m = chart.desing_rhs(u[0], u[1] - d);
  eq.jacobian = Mat2{(fx_p[0] - fx_m[0]) / (2.0 * d), (fy_p[0] - fy_m[0]) / (2.0 * d),
                     (fx_p[1] - fx_m[1]) / (2.0 * d), (fy_p[1] - fy_m[1]) / (2.0 * d)};
  const Eig2 e = eig2(eq.jacobian);
  eq.det = e.det;
  eq.trace = e.tr;
  eq.disc = e.disc;
  eq.kind = classify_equilibrium(eq.det, eq.trace, eq.disc, ro.degen_tol);

  eq.full_state = chart.manifold_point(u[0], u[1]);
  const auto rhs = eval_full_rhs(chart.system(), eq.full_state, chart.params());
  eq.full_residual = std::max({std::fabs(rhs[0]), std::fabs(rhs[1]),
                               std::fabs(rhs[2]), std::fabs(rhs[3])});
  return eq;
}

const CheckItem* TranscriticalReport::find_check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

double critical_eigenvalue(const Mat2& jac) {
  const Eig2 e = eig2(jac);
  if (!e.real) return e.big;  // common real part of the complex pair
  return std::fabs(e.small) <= std::fabs(e.big) ? e.small : e.big;
}

// Distinct roots of the desingularized field inside a chart box, by Newton
// from a coarse grid of starts.
std::vector<Vec2> desing_roots_in_box(const ReducedChart& chart, double x1_max,
                                      double y2_lo, double y2_hi) {
  const ReducedOptions& ro = chart.options();
  std::vector<Vec2> roots;
  const int nx = 7, ny = 9;
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      Vec2 u{-x1_max + 2.0 * x1_max * i / (nx - 1),
             y2_lo + (y2_hi - y2_lo) * j / (ny - 1)};
      bool ok = true;
      Vec2 r{};
      try {
        r = chart.desing_rhs(u[0], u[1]);
        for (int iter = 0; iter < 30; ++iter) {
          const double rn = std::max(std::fabs(r[0]), std::fabs(r[1]));
          if (rn <= ro.root_tol) break;
          if (iter == 29) { ok = false; break; }
          const double d = ro.partial_step;
          const Vec2 ap = chart.desing_rhs(u[0] + d, u[1]);
          const Vec2 am = chart.desing_rhs(u[0] - d, u[1]);
          const Vec2 bp = chart.desing_rhs(u[0], u[1] + d);
          const Vec2 bm = chart.desing_rhs(u[0], u[1] - d);
          const Mat2 jac{(ap[0] - am[0]) / (2 * d), (bp[0] - bm[0]) / (2 * d),
                         (ap[1] - am[1]) / (2 * d), (bp[1] - bm[1]) / (2 * d)};
          const Vec2 step = solve2(jac, {-r[0], -r[1]});
          u = {u[0] + step[0], u[1] + step[1]};
          r = chart.desing_rhs(u[0], u[1]);
        }
      } catch (const std::exception&) {
        ok = false;
      }
      if (!ok) continue;
      if (std::fabs(u[0]) > x1_max || u[1] < y2_lo || u[1] > y2_hi) continue;
      bool dup = false;
      for (const auto& q : roots)
        if (std::fabs(q[0] - u[0]) < 1e-6 && std::fabs(q[1] - u[1]) < 1e-6)
          dup = true;
      if (!dup) roots.push_back(u);
    }
  }
  return roots;
}

}  // namespace

TranscriticalReport detect_fsn2(const SystemDefinition& sys, const Params& p,
                                std::pair<double, double> c1_bracket,
                                const FoldOptions& fopt,
                                const ReducedOptions& ropt) {
  if (!(c1_bracket.first < c1_bracket.second))
    throw std::invalid_argument("detect_fsn2: empty c1 bracket");

  TranscriticalReport rep;
  rep.side_delta = ropt.side_delta;

  auto chart_at = [&](double c1) {
    Params q = p;
    q.c1 = c1;
    return ReducedChart(sys, q, fopt, ropt);
  };
  // g2 on the fold line at the folded singularity of the c1-slice; its zero
  // crossing in c1 is the FSN II candidate.
  auto crossing_fn = [&](double c1) {
    const ReducedChart chart = chart_at(c1);
    const double y2f = folded_root_y2(chart, std::nullopt);
    return chart.g2(0.0, y2f);
  };

  int skipped = 0;
  auto guarded = [&](double c1) {
    return crossing_fn(c1);  // may throw SolverError
  };
  // Grid scan; endpoints of the user bracket may sit outside the solvable
  // region of the fold branch, so failures only shrink the usable range.
  double a = 0.0, b = 0.0, fa = 0.0, fb = 0.0;
  {
    const int grid = std::max(ropt.bracket_grid, 5);
    bool have_prev = false, found = false;
    double px = 0.0, pf = 0.0;
    for (int i = 0; i < grid && !found; ++i) {
      const double c1 = c1_bracket.first +
                        (c1_bracket.second - c1_bracket.first) * i / (grid - 1);
      double f;
      try {
        f = guarded(c1);
      } catch (const SolverError&) {
        ++skipped;
        have_prev = false;
        continue;
      }
      if (have_prev && pf * f <= 0.0) {
        a = px; fa = pf; b = c1; fb = f;
        found = true;
      }
      px = c1; pf = f; have_prev = true;
    }
    if (skipped > 0) {
      std::ostringstream os;
      os << skipped << " grid point(s) skipped (fold branch unsolvable there)";
      rep.notes.push_back(os.str());
    }
    if (!found) {
      std::ostringstream os;
      os << "detect_fsn2: no sign change of g2(0, y2_fold(c1)) in bracket ["
         << c1_bracket.first << ", " << c1_bracket.second << "]";
      throw BracketError(os.str());
    }
  }

  while (b - a > ropt.bisect_tol_c1) {
    const double mid = 0.5 * (a + b);
    const double fm = guarded(mid);
    if (fm == 0.0) { a = b = mid; fa = fb = 0.0; break; }
    if (fa * fm < 0.0) { b = mid; fb = fm; }
    else { a = mid; fa = fm; }
  }
  double c1_star = 0.5 * (a + b);
  if (fb != fa) {
    const double sec = a - fa * (b - a) / (fb - fa);
    if (sec >= a && sec <= b) c1_star = sec;
  }
  rep.c1_star = c1_star;

  const double delta = ropt.side_delta;
  const ReducedChart chart_star = chart_at(c1_star);
  rep.folded_at = find_folded_singularity(chart_star);
  rep.y2_star = rep.folded_at.y2_fold;
  rep.ord_at = find_ordinary_equilibrium(chart_star);

  const ReducedChart chart_minus = chart_at(c1_star - delta);
  const ReducedChart chart_plus = chart_at(c1_star + delta);
  rep.folded_minus = find_folded_singularity(chart_minus);
  rep.folded_plus = find_folded_singularity(chart_plus);
  rep.ord_minus = find_ordinary_equilibrium(chart_minus);
  rep.ord_plus = find_ordinary_equilibrium(chart_plus);

  // Eigenvalue traces on both sides of criticality.
  for (double frac : {-1.0, -0.5, -0.25, 0.25, 0.5, 1.0}) {
    const double c1 = c1_star + frac * delta;
    FoldedSingularity f;
    OrdinaryEquilibrium o;
    if (frac == -1.0) { f = rep.folded_minus; o = rep.ord_minus; }
    else if (frac == 1.0) { f = rep.folded_plus; o = rep.ord_plus; }
    else {
      const ReducedChart chart = chart_at(c1);
      f = find_folded_singularity(chart);
      o = find_ordinary_equilibrium(chart);
    }
    rep.eigenvalue_traces.push_back({c1, critical_eigenvalue(f.jacobian),
                                     critical_eigenvalue(o.jacobian), f.det,
                                     o.det});
    rep.scanned_equilibria.push_back(o);
  }
  rep.scanned_equilibria.push_back(rep.ord_at);

  auto add = [&](const std::string& name, bool pass, double margin,
                 std::string detail = {}) {
    rep.checks.push_back({name, pass, margin, std::move(detail)});
  };

  // (i) simple zero eigenvalue at criticality, the other bounded away.
  {
    const Eig2 e = eig2(rep.folded_at.jacobian);
    const double small = std::fabs(critical_eigenvalue(rep.folded_at.jacobian));
    const double big = std::max(std::fabs(e.big), std::fabs(e.small));
    add("def3_i_simple_zero_eigenvalue",
        e.real && small < 1e-6 && big > 1e-3, small,
        "critical |eig| at c1_star; other eig " + std::to_string(big));
  }

  // (ii) the folded and ordinary branches coincide at criticality, are
  // distinct off criticality, and are the only stationary points nearby.
  {
    const double coincide = std::max(
        std::fabs(rep.ord_at.x1_e),
        std::fabs(rep.ord_at.y2_e - rep.folded_at.y2_fold));
    const bool distinct = std::fabs(rep.ord_minus.x1_e) > 1e-4 &&
                          std::fabs(rep.ord_plus.x1_e) > 1e-4 &&
                          rep.ord_minus.x1_e * rep.ord_plus.x1_e < 0.0;
    add("def3_ii_branches_cross", coincide < 1e-8 && distinct, coincide,
        "max branch separation at c1_star");

    const double spread = std::max(
        {0.05, 1.5 * std::fabs(rep.folded_minus.y2_fold - rep.y2_star),
         1.5 * std::fabs(rep.folded_plus.y2_fold - rep.y2_star)});
    const auto roots_m = desing_roots_in_box(chart_minus, 0.04,
                                             rep.y2_star - spread,
                                             rep.y2_star + spread);
    const auto roots_p = desing_roots_in_box(chart_plus, 0.04,
                                             rep.y2_star - spread,
                                             rep.y2_star + spread);
    add("def3_ii_two_branches_only",
        roots_m.size() == 2 && roots_p.size() == 2,
        static_cast<double>(std::max(roots_m.size(), roots_p.size())),
        "stationary points of the desingularized field near criticality");
  }

  // (iii) nontrivial eigenvalues of the two branches have opposite signs off
  // criticality and vanish at it.
  {
    double worst_product = -1.0;
    bool sides_ok = true;
    for (const auto& t : rep.eigenvalue_traces) {
      const double prod = t.lambda_folded * t.lambda_ordinary;
      worst_product = std::max(worst_product, prod);
      if (!(prod < 0.0)) sides_ok = false;
    }
    const double at_crit = std::max(
        std::fabs(critical_eigenvalue(rep.folded_at.jacobian)),
        std::fabs(critical_eigenvalue(rep.ord_at.jacobian)));
    add("def3_iii_eigenvalue_exchange", sides_ok && at_crit < 1e-6,
        worst_product, "max lambda_folded*lambda_ordinary over trace points");
  }

  // Orientation products. The transcritical crossing requires the two
  // products to carry the same sign (the paired reading of the dual-signed
  // hypotheses).
  double h1o = 0.0, h2o = 0.0;
  {
    const double d = ropt.partial_step;
    const double dg2dy2 =
        (chart_star.g2(0.0, rep.y2_star + d) - chart_star.g2(0.0, rep.y2_star - d)) /
        (2.0 * d);
    h1o = rep.folded_at.dg1_dy2 * rep.folded_at.dg1_dx1 * dg2dy2;
    add("h1o_product", std::fabs(h1o) > 1e-10, h1o,
        "dg1/dy2 * dG1/dx1 * dg2/dy2 at criticality");

    const double dx1e_dc1 = (rep.ord_plus.x1_e - rep.ord_minus.x1_e) / (2.0 * delta);
    const double dg2_dc1 =
        (rep.folded_plus.g2_value - rep.folded_minus.g2_value) / (2.0 * delta);
    h2o = dx1e_dc1 * dg2_dc1;
    add("h2o_product", std::fabs(h2o) > 1e-10, h2o,
        "dx1_e/dc1 * dg2(0, y2_fold(c1))/dc1");

    add("h1o_h2o_pairing", h1o * h2o > 0.0, h1o * h2o,
        "consistent sign pairing of the two orientation products");
  }

  // Determinant sign exchange between the branches.
  {
    const bool folded_flips = rep.folded_minus.det * rep.folded_plus.det < 0.0;
    const bool ord_flips = rep.ord_minus.det * rep.ord_plus.det < 0.0;
    const bool opposite = rep.folded_minus.det * rep.ord_minus.det < 0.0;
    add("det_sign_exchange", folded_flips && ord_flips && opposite,
        rep.folded_minus.det * rep.folded_plus.det,
        "det J flips across c1_star on both branches, with opposite phases");
  }

  rep.confirmed = true;
  for (const auto& c : rep.checks) rep.confirmed = rep.confirmed && c.pass;
  return rep;
}

void verify_fhn_hypotheses(const SystemDefinition& sys, const Params& p,
                           TranscriticalReport& rep, const FoldOptions& fopt,
                           const ReducedOptions& ropt) {
  Params q = p;
  q.c1 = rep.c1_star;
  const ReducedChart chart(sys, q, fopt, ropt);
  const double d = ropt.partial_step;

  auto add = [&](const std::string& name, bool pass, double margin,
                 std::string detail = {}) {
    rep.checks.push_back({name, pass, margin, std::move(detail)});
  };

  const double h1 =
      (chart.g1(0.0, rep.y2_star + d) - chart.g1(0.0, rep.y2_star - d)) / (2.0 * d);
  add("fhn_h1_dg1dy2_positive", h1 > 0.0, h1, "dg1/dy2 at (0, y2_star)");

  const Vec3 tangent = chart.fold_tangent_at(rep.y2_star);
  add("fhn_h2_dx2star_dy2_negative", tangent[1] < 0.0, tangent[1],
      "dx2*/dy2 along the fold curve");

  const double h3 =
      (rep.ord_plus.x1_e - rep.ord_minus.x1_e) / (2.0 * rep.side_delta);
  add("fhn_h3_dx1e_dc1_positive", h3 > 0.0, h3, "dx1_e/dc1 across c1_star");

  const double h4 = (rep.folded_plus.g2_value - rep.folded_minus.g2_value) /
                    (2.0 * rep.side_delta);
  add("fhn_h4_dg2_dc1_negative", h4 < 0.0, h4,
      "dg2(0, y2_fold(c1))/dc1 across c1_star");

  const double x2s = chart.fold_at(rep.y2_star).x2_star;
  const double om = 1.0 - x2s * x2s;
  const double margin = p.beta1 - p.alpha1 / (9.0 * om * om);
  add("fhn_h1_sufficiency_margin", margin > 0.0, margin,
      "beta1 - alpha1/(9 (1 - x2*^2)^2)");

  for (std::size_t i = rep.checks.size() - 5; i < rep.checks.size(); ++i)
    rep.confirmed = rep.confirmed && rep.checks[i].pass;
}

namespace {

double point_segment_dist(const Vec2& p, const Vec2& a, const Vec2& b) {
  const double vx = b[0] - a[0], vy = b[1] - a[1];
  const double wx = p[0] - a[0], wy = p[1] - a[1];
  const double vv = vx * vx + vy * vy;
  double t = vv > 0.0 ? (wx * vx + wy * vy) / vv : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = wx - t * vx, dy = wy - t * vy;
  return std::sqrt(dx * dx + dy * dy);
}

double directed_hausdorff(const std::vector<Vec2>& from,
                          const std::vector<Vec2>& to) {
  double worst = 0.0;
  for (const auto& p : from) {
    double best = std::numeric_limits<double>::infinity();
    if (to.size() == 1) best = point_segment_dist(p, to[0], to[0]);
    for (std::size_t i = 0; i + 1 < to.size(); ++i) {
      best = std::min(best, point_segment_dist(p, to[i], to[i + 1]));
      if (best == 0.0) break;
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

FlowMatchReport reduced_flow_match(const ReducedChart& chart, Vec2 s0, double T,
                                   double dt) {
  const ReducedOptions& ro = chart.options();
  if (!(T > 0.0) || !(dt > 0.0))
    throw std::invalid_argument("reduced_flow_match: need T > 0 and dt > 0");
  if (std::fabs(s0[0]) <= ro.fold_min_x1)
    throw SolverError("reduced_flow_match: start too close to the fold line" +
                      fmt_at("x1", s0[0]));

  FlowMatchReport rep;
  const Vec2 v_des0 = chart.desing_rhs(s0[0], s0[1]);
  const double m0 = chart.manifold_slope(s0[0], s0[1]);
  const double des_speed = std::hypot(v_des0[0], v_des0[1]);
  if (des_speed < 1e-12) {
    rep.at_equilibrium = true;
    rep.n_reduced = rep.n_desing = 1;
    rep.T_covered = T;
    return rep;
  }
  rep.orientation_reversed = m0 < 0.0;
  const Vec2 v_red0 = chart.reduced_rhs(s0[0], s0[1]);
  // Cross-check the sign convention against the actual velocities.
  if ((v_red0[0] * v_des0[0] + v_red0[1] * v_des0[1] < 0.0) !=
      rep.orientation_reversed)
    throw SolverError("reduced_flow_match: inconsistent orientation data");

  auto rk4_plane = [&](const Vec2& u, auto&& field) {
    const Vec2 k1 = field(u);
    const Vec2 k2 = field(Vec2{u[0] + 0.5 * dt * k1[0], u[1] + 0.5 * dt * k1[1]});
    const Vec2 k3 = field(Vec2{u[0] + 0.5 * dt * k2[0], u[1] + 0.5 * dt * k2[1]});
    const Vec2 k4 = field(Vec2{u[0] + dt * k3[0], u[1] + dt * k3[1]});
    return Vec2{u[0] + dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
                u[1] + dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
  };

  auto red_field = [&](const Vec2& u) { return chart.reduced_rhs(u[0], u[1]); };
  const double dir = rep.orientation_reversed ? -1.0 : 1.0;
  auto des_field = [&](const Vec2& u) {
    const Vec2 f = chart.desing_rhs(u[0], u[1]);
    return Vec2{dir * f[0], dir * f[1]};
  };

  std::vector<Vec2> red{s0};
  double arc_red = 0.0;
  const auto n_steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-12));
  for (std::size_t k = 0; k < n_steps; ++k) {
    Vec2 next;
    try {
      next = rk4_plane(red.back(), red_field);
    } catch (const ChartError&) {
      rep.chart_exit = true;
      break;
    } catch (const SolverError&) {
      rep.fold_crossing = true;
      break;
    }
    if (std::fabs(next[0]) <= ro.fold_min_x1) {
      rep.fold_crossing = true;
      break;
    }
    if (std::fabs(next[0]) >= ro.chart_radius) {
      rep.chart_exit = true;
      break;
    }
    arc_red += std::hypot(next[0] - red.back()[0], next[1] - red.back()[1]);
    red.push_back(next);
    rep.T_covered += dt;
  }

  std::vector<Vec2> des{s0};
  double arc_des = 0.0;
  const std::size_t cap = 200 * (red.size() + 16);
  for (std::size_t k = 0; k < cap && arc_des < arc_red; ++k) {
    Vec2 next;
    try {
      next = rk4_plane(des.back(), des_field);
    } catch (const SolverError&) {
      break;
    }
    if (std::fabs(next[0]) <= ro.fold_min_x1 ||
        std::fabs(next[0]) >= ro.chart_radius)
      break;
    const double ds = std::hypot(next[0] - des.back()[0], next[1] - des.back()[1]);
    if (arc_des + ds > arc_red && ds > 0.0) {
      // clip the final segment so both polylines cover the same arc length
      const double t = (arc_red - arc_des) / ds;
      next = {des.back()[0] + t * (next[0] - des.back()[0]),
              des.back()[1] + t * (next[1] - des.back()[1])};
      arc_des = arc_red;
      des.push_back(next);
      break;
    }
    arc_des += ds;
    des.push_back(next);
  }

  rep.n_reduced = red.size();
  rep.n_desing = des.size();
  rep.hausdorff =
      std::max(directed_hausdorff(red, des), directed_hausdorff(des, red));
  return rep;
}

}  // namespace slowfast
