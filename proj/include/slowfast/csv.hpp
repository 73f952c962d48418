#pragma once

#include <ostream>
#include <string>

#include "slowfast/fold.hpp"
#include "slowfast/integrate.hpp"
#include "slowfast/mmo.hpp"
#include "slowfast/reduced.hpp"

namespace slowfast {

/// Round-trippable decimal rendering (17 significant digits, '.' decimal
/// point); all CSV output goes through this so reruns are byte-identical.
std::string format_double(double x);

void write_fold_curve_csv(std::ostream& os, const FoldCurve& curve);
void write_trajectory_csv(std::ostream& os, const Trajectory<4>& traj);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

/// key: value report, one line per field and check.
void write_fsn2_report(std::ostream& os, const TranscriticalReport& rep);
/// single-row CSV: c1_star, y2_star, confirmed, then one margin per check.
void write_fsn2_csv(std::ostream& os, const TranscriticalReport& rep);

void write_singularity_report(std::ostream& os, const FoldedSingularity& fs,
                              const OrdinaryEquilibrium& eq);

}  // namespace slowfast
