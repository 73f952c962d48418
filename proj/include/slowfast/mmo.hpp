#pragma once

#include <span>
#include <string>
#include <vector>

#include "slowfast/integrate.hpp"
#include "slowfast/system.hpp"

namespace slowfast {

struct Peak {
  double t = 0.0;
  double value = 0.0;
  double prominence = 0.0;  // drop to the surrounding minima
};

struct MmoBlock {
  int large = 0;
  int small = 0;
};

/// Signature of a mixed-mode trajectory: blocks of L large oscillations
/// followed by s small ones, in canonical (non-mergeable) form.
struct MmoSignature {
  std::vector<MmoBlock> blocks;

  bool alternating() const;  // at least one block with L >= 1 and s >= 1
  std::string str() const;   // "L1^s1 L2^s2 ...", "-" when empty
};

enum class AttractorClass { Equilibrium, SmallCycle, MMO, Relaxation, Unclassified };

const char* to_string(AttractorClass c);

struct AnalysisConfig {
  double transient_fraction = 0.5;
  double noise_floor = 1e-4;
  double large_threshold = 1.5;
  double small_threshold = 0.01;
  double eq_tol = 1e-4;
  int component = 0;  // oscillator 1 carries the canard
};

/// Local maxima of a sampled series after the transient window, with
/// topographic prominence; peaks below the noise floor are merged away.
std::vector<Peak> extract_peaks(std::span<const double> times,
                                std::span<const double> values,
                                double transient_fraction, double noise_floor);

std::vector<Peak> extract_peaks(const Trajectory<4>& traj, int component,
                                double transient_fraction,
                                double noise_floor = 1e-4);

/// Compresses a peak train into the canonical block form; peaks with
/// prominence >= large_threshold are L-events, those in
/// [small_threshold, large_threshold) are s-events, smaller ones are ignored.
MmoSignature signature(const std::vector<Peak>& peaks, double large_threshold,
                       double small_threshold);

struct Classification {
  AttractorClass cls = AttractorClass::Unclassified;
  MmoSignature sig;
  double post_range = 0.0;  // range of the component after the transient
  int n_large = 0;
  int n_small = 0;
};

Classification classify_attractor(const Trajectory<4>& traj,
                                  const AnalysisConfig& cfg);

struct SimConfig {
  Params params;
  State initial{-0.9, -1.5, -2.0, -1.125};
  double dt = 0.001;
  double t_end = 500.0;
  int record_every = 10;
};

struct SweepRow {
  double c1 = 0.0;
  Classification result;
  StateVec<4> final_state{};
  bool blew_up = false;
};

/// One full simulate-and-classify pipeline per c1 value; rows are
/// independent, run on up to `jobs` threads (0 = hardware concurrency) and
/// returned in input order.
std::vector<SweepRow> sweep_c1(const SystemDefinition& sys,
                               const std::vector<double>& c1_values,
                               const SimConfig& sim, const AnalysisConfig& cfg,
                               int jobs = 0);

}  // namespace slowfast
