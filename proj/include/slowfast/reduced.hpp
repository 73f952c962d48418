#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slowfast/fold.hpp"
#include "slowfast/linalg.hpp"
#include "slowfast/system.hpp"

namespace slowfast {

struct ReducedOptions {
  double root_tol = 1e-11;      // |g| at accepted roots
  double partial_step = 1e-6;   // central-difference step for g partials
  double chart_radius = 0.5;    // validity bound on the local x1 coordinate
  double degen_tol = 1e-9;      // |det| below this is "at criticality"
  double dg1dy2_floor = 1e-8;   // implicit-function-theorem hypothesis floor
  double nu_max = 0.1;          // small-coupling gate
  int max_iter = 50;
  double bisect_tol_c1 = 1e-10;
  int bracket_grid = 21;        // scan resolution inside a c1 bracket
  double side_delta = 0.003;    // off-criticality probe offset in c1
  double fold_min_x1 = 0.05;    // flow-match keep-away band around the fold
};

/// Local chart around the fold curve: for each y2 the fold point is solved
/// and the fast subsystem diagonalized; x1 then parametrizes the critical
/// manifold transversally to the fold. Provides the slow right-hand sides
/// g1, g2 on the manifold, the manifold slope m = dy1/dx1, and the reduced
/// and desingularized planar fields
///   reduced:        m(x1) x1' = g1,  y2' = g2
///   desingularized:        x1' = g1,  y2' = g2 * m(x1).
/// Fold solutions are cached and continued from the previous query, so a
/// chart instance is cheap to evaluate along a trajectory but must not be
/// shared across threads.
class ReducedChart {
 public:
  ReducedChart(SystemDefinition sys, Params p, FoldOptions fopt = {},
               ReducedOptions ropt = {});

  const Params& params() const { return p_; }
  const SystemDefinition& system() const { return sys_; }
  const FoldOptions& fold_options() const { return fopt_; }
  const ReducedOptions& options() const { return ropt_; }

  FoldPoint fold_at(double y2) const;
  Vec3 fold_tangent_at(double y2) const;
  double dy1star_dy2(double y2) const;

  /// 4D point on the critical manifold at chart coordinates (x1, y2).
  State manifold_point(double x1, double y2) const;

  /// Exact slope m = dy1/dx1 of the solved manifold; identically 0 on the
  /// fold line x1 = 0.
  double manifold_slope(double x1, double y2) const;

  double g1(double x1, double y2) const;
  double g2(double x1, double y2) const;
  Vec2 g_pair(double x1, double y2) const;  // (g1, g2) with one manifold solve

  Vec2 desing_rhs(double x1, double y2) const;
  Vec2 reduced_rhs(double x1, double y2) const;  // throws near the fold line

 private:
  State manifold_point_at(const FoldPoint& fp, double x1) const;
  double slope_at(const FoldPoint& fp, const State& s, double x1) const;
  void check_chart(double x1) const;

  SystemDefinition sys_;
  Params p_;
  FoldOptions fopt_;
  ReducedOptions ropt_;
  mutable bool have_fold_ = false;
  mutable FoldPoint last_fold_;
};

/// Leading-order closed forms of the FitzHugh-Nagumo reduced right-hand
/// sides; they agree with the generic chart evaluation to O(x1^2).
double fhn_g1_explicit(const ReducedChart& chart, double x1, double y2);
double fhn_g2_explicit(const ReducedChart& chart, double x1, double y2);

enum class FoldedKind {
  FoldedSaddle,
  FoldedNodeAttracting,
  FoldedNodeRepelling,
  FoldedFocus,
  DegenerateNearFsn,
};

const char* to_string(FoldedKind k);

/// Equilibrium of the desingularized flow on the fold line, with the
/// Jacobian assembled as [[dg1/dx1, dg1/dy2], [2 K g2, 0]] (row 1 by central
/// differences, row 2 in closed form).
struct FoldedSingularity {
  double c1 = 0.0;
  double y2_fold = 0.0;
  Mat2 jacobian;
  double det = 0.0;
  double trace = 0.0;
  double disc = 0.0;
  bool eig_real = true;
  double eig_big = 0.0;
  double eig_small = 0.0;
  FoldedKind kind = FoldedKind::DegenerateNearFsn;
  double g1_residual = 0.0;
  double g2_value = 0.0;
  double dg1_dx1 = 0.0;
  double dg1_dy2 = 0.0;
  double K = 0.0;
};

FoldedSingularity find_folded_singularity(
    const ReducedChart& chart,
    std::optional<std::pair<double, double>> y2_bracket = {});

enum class EquilibriumKind {
  Saddle,
  AttractingNode,
  RepellingNode,
  AttractingFocus,
  RepellingFocus,
  Degenerate,
};

const char* to_string(EquilibriumKind k);

/// Root of g1 = g2 = 0 off the fold line; a true equilibrium of the full
/// system. The Jacobian is the honest central-difference Jacobian of the
/// desingularized field.
struct OrdinaryEquilibrium {
  double c1 = 0.0;
  double x1_e = 0.0;
  double y2_e = 0.0;
  Mat2 jacobian;
  double det = 0.0;
  double trace = 0.0;
  double disc = 0.0;
  EquilibriumKind kind = EquilibriumKind::Degenerate;
  double residual = 0.0;
  State full_state;           // 4D lift onto the critical manifold
  double full_residual = 0.0; // max |rhs| of the full system there
};

OrdinaryEquilibrium find_ordinary_equilibrium(const ReducedChart& chart,
                                              std::optional<Vec2> seed = {});

struct CheckItem {
  std::string name;
  bool pass = false;
  double margin = 0.0;
  std::string detail;
};

struct FsnTracePoint {
  double c1 = 0.0;
  double lambda_folded = 0.0;    // critical eigenvalue of the folded branch
  double lambda_ordinary = 0.0;  // critical eigenvalue of the ordinary branch
  double det_folded = 0.0;
  double det_ordinary = 0.0;
};

struct TranscriticalReport {
  double c1_star = 0.0;
  double y2_star = 0.0;
  bool confirmed = false;
  double side_delta = 0.0;
  std::vector<CheckItem> checks;
  std::vector<FsnTracePoint> eigenvalue_traces;
  FoldedSingularity folded_minus, folded_at, folded_plus;
  OrdinaryEquilibrium ord_minus, ord_at, ord_plus;
  std::vector<OrdinaryEquilibrium> scanned_equilibria;
  std::vector<std::string> notes;

  const CheckItem* find_check(const std::string& name) const;
};

/// Locates the FSN II transition: bisection in c1 on g2(0, y2_fold(c1))
/// inside the bracket, then the transcritical-bifurcation checks (simple
/// zero eigenvalue, branch crossing and uniqueness, eigenvalue exchange,
/// orientation products) evaluated at c1_star and c1_star +- side_delta.
/// Throws BracketError when the bracket contains no sign change; hypothesis
/// failures are reported in the returned checks, not thrown.
TranscriticalReport detect_fsn2(const SystemDefinition& sys, const Params& p,
                                std::pair<double, double> c1_bracket,
                                const FoldOptions& fopt = {},
                                const ReducedOptions& ropt = {});

/// FitzHugh-Nagumo specific hypothesis margins (H1-H4 and the closed-form
/// sufficiency bound beta1 - alpha1/(9 (1 - x2*^2)^2)); appends check items
/// and updates report.confirmed.
void verify_fhn_hypotheses(const SystemDefinition& sys, const Params& p,
                           TranscriticalReport& report,
                           const FoldOptions& fopt = {},
                           const ReducedOptions& ropt = {});

struct FlowMatchReport {
  double hausdorff = 0.0;
  bool orientation_reversed = false;
  bool chart_exit = false;
  bool fold_crossing = false;
  bool at_equilibrium = false;
  double T_covered = 0.0;
  std::size_t n_reduced = 0;
  std::size_t n_desing = 0;
};

/// Integrates the reduced and the desingularized fields from the same start
/// and compares the trajectory point-sets (Hausdorff distance); on the
/// m < 0 side the desingularized field is traversed backwards and the
/// orientation reversal is reported. Aborts with a partial report when the
/// trajectory approaches the fold line or leaves the chart.
FlowMatchReport reduced_flow_match(const ReducedChart& chart, Vec2 s0, double T,
                                   double dt = 2.5e-4);

}  // namespace slowfast
