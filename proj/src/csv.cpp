#include "slowfast/csv.hpp"

#include <cstdio>

namespace slowfast {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_fold_curve_csv(std::ostream& os, const FoldCurve& curve) {
  os << "y2,x1,x2,y1,lambda,v,w,d,K,kappa,residual\n";
  for (const auto& fp : curve.points) {
    os << format_double(fp.y2) << ',' << format_double(fp.x1_star) << ','
       << format_double(fp.x2_star) << ',' << format_double(fp.y1_star) << ','
       << format_double(fp.lambda) << ',' << format_double(fp.v) << ','
       << format_double(fp.w) << ',' << format_double(fp.d) << ','
       << format_double(fp.K) << ',' << format_double(fp.kappa) << ','
       << format_double(fp.residual) << '\n';
  }
}

void write_trajectory_csv(std::ostream& os, const Trajectory<4>& traj) {
  os << "t,x1,x2,y1,y2\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    os << format_double(traj.times[i]);
    for (double u : traj.states[i]) os << ',' << format_double(u);
    os << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "c1,class,signature,final_x1,final_x2,final_y1,final_y2\n";
  for (const auto& r : rows) {
    os << format_double(r.c1) << ','
       << (r.blew_up ? "blow-up" : to_string(r.result.cls)) << ','
       << r.result.sig.str();
    for (double u : r.final_state) os << ',' << format_double(u);
    os << '\n';
  }
}

void write_fsn2_report(std::ostream& os, const TranscriticalReport& rep) {
  os << "c1_star: " << format_double(rep.c1_star) << '\n';
  os << "y2_star: " << format_double(rep.y2_star) << '\n';
  os << "confirmed: " << (rep.confirmed ? "true" : "false") << '\n';
  os << "side_delta: " << format_double(rep.side_delta) << '\n';
  os << "folded_kind_below: " << to_string(rep.folded_minus.kind) << '\n';
  os << "folded_kind_above: " << to_string(rep.folded_plus.kind) << '\n';
  os << "ordinary_kind_below: " << to_string(rep.ord_minus.kind) << '\n';
  os << "ordinary_kind_above: " << to_string(rep.ord_plus.kind) << '\n';
  os << "det_folded_below: " << format_double(rep.folded_minus.det) << '\n';
  os << "det_folded_above: " << format_double(rep.folded_plus.det) << '\n';
  os << "det_ordinary_below: " << format_double(rep.ord_minus.det) << '\n';
  os << "det_ordinary_above: " << format_double(rep.ord_plus.det) << '\n';
  for (const auto& c : rep.checks) {
    os << "check." << c.name << ": " << (c.pass ? "pass" : "fail")
       << " margin=" << format_double(c.margin);
    if (!c.detail.empty()) os << "  # " << c.detail;
    os << '\n';
  }
  for (const auto& t : rep.eigenvalue_traces) {
    os << "trace: c1=" << format_double(t.c1)
       << " lambda_folded=" << format_double(t.lambda_folded)
       << " lambda_ordinary=" << format_double(t.lambda_ordinary)
       << " det_folded=" << format_double(t.det_folded)
       << " det_ordinary=" << format_double(t.det_ordinary) << '\n';
  }
  for (const auto& n : rep.notes) os << "note: " << n << '\n';
}

void write_fsn2_csv(std::ostream& os, const TranscriticalReport& rep) {
  os << "c1_star,y2_star,confirmed";
  for (const auto& c : rep.checks) os << ',' << c.name;
  os << '\n';
  os << format_double(rep.c1_star) << ',' << format_double(rep.y2_star) << ','
     << (rep.confirmed ? 1 : 0);
  for (const auto& c : rep.checks) os << ',' << format_double(c.margin);
  os << '\n';
}

void write_singularity_report(std::ostream& os, const FoldedSingularity& fs,
                              const OrdinaryEquilibrium& eq) {
  os << "c1: " << format_double(fs.c1) << '\n';
  os << "folded.y2: " << format_double(fs.y2_fold) << '\n';
  os << "folded.kind: " << to_string(fs.kind) << '\n';
  os << "folded.det: " << format_double(fs.det) << '\n';
  os << "folded.trace: " << format_double(fs.trace) << '\n';
  os << "folded.jacobian: [[" << format_double(fs.jacobian(0, 0)) << ", "
     << format_double(fs.jacobian(0, 1)) << "], ["
     << format_double(fs.jacobian(1, 0)) << ", "
     << format_double(fs.jacobian(1, 1)) << "]]\n";
  os << "folded.g2: " << format_double(fs.g2_value) << '\n';
  os << "folded.K: " << format_double(fs.K) << '\n';
  os << "ordinary.x1: " << format_double(eq.x1_e) << '\n';
  os << "ordinary.y2: " << format_double(eq.y2_e) << '\n';
  os << "ordinary.kind: " << to_string(eq.kind) << '\n';
  os << "ordinary.det: " << format_double(eq.det) << '\n';
  os << "ordinary.trace: " << format_double(eq.trace) << '\n';
  os << "ordinary.full_state: (" << format_double(eq.full_state.x1) << ", "
     << format_double(eq.full_state.x2) << ", "
     << format_double(eq.full_state.y1) << ", "
     << format_double(eq.full_state.y2) << ")\n";
  os << "ordinary.full_residual: " << format_double(eq.full_residual) << '\n';
}

}  // namespace slowfast
