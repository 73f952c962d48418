#include "slowfast/mmo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace slowfast {

bool MmoSignature::alternating() const {
  for (const auto& b : blocks)
    if (b.large >= 1 && b.small >= 1) return true;
  return false;
}

std::string MmoSignature::str() const {
  if (blocks.empty()) return "-";
  std::ostringstream os;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (i) os << ' ';
    os << blocks[i].large << '^' << blocks[i].small;
  }
  return os.str();
}

const char* to_string(AttractorClass c) {
  switch (c) {
    case AttractorClass::Equilibrium: return "equilibrium";
    case AttractorClass::SmallCycle: return "small-cycle";
    case AttractorClass::MMO: return "mmo";
    case AttractorClass::Relaxation: return "relaxation";
    case AttractorClass::Unclassified: return "unclassified";
  }
  return "?";
}

std::vector<Peak> extract_peaks(std::span<const double> times,
                                std::span<const double> values,
                                double transient_fraction, double noise_floor) {
  if (times.size() != values.size())
    throw std::invalid_argument("extract_peaks: length mismatch");
  if (!(transient_fraction >= 0.0 && transient_fraction < 1.0))
    throw std::invalid_argument("extract_peaks: transient_fraction in [0,1)");
  const std::size_t n = times.size();
  if (n < 3) return {};

  const double t_cut =
      times.front() + transient_fraction * (times.back() - times.front());
  std::size_t i0 = 0;
  while (i0 < n && times[i0] < t_cut) ++i0;
  if (n - i0 < 3) return {};

  // Alternating minima / maxima of the post-transient window, with plateau
  // collapse. mins has one more entry than peaks (boundary minima included).
  std::vector<std::size_t> peaks;
  std::vector<double> mins;

  double cur_min = values[i0];
  int dir = 0;  // -1 falling, +1 rising
  std::size_t last_rise_peak = i0;
  for (std::size_t i = i0 + 1; i < n; ++i) {
    const double dv = values[i] - values[i - 1];
    if (dv > 0.0) {
      if (dir <= 0) {
        cur_min = std::min(cur_min, values[i - 1]);
        dir = 1;
      }
      last_rise_peak = i;
    } else if (dv < 0.0) {
      if (dir == 1) {
        peaks.push_back(last_rise_peak);
        mins.push_back(cur_min);
        cur_min = values[i];
        dir = -1;
      } else {
        dir = -1;
        cur_min = std::min(cur_min, values[i]);
      }
    }
  }
  mins.push_back(std::min(cur_min, values[n - 1]));

  if (peaks.empty()) return {};

  // Prune sub-floor peaks by merging their valleys, lowest prominence first.
  auto prom = [&](std::size_t k) {
    return std::min(values[peaks[k]] - mins[k], values[peaks[k]] - mins[k + 1]);
  };
  while (!peaks.empty()) {
    std::size_t worst = 0;
    double worst_p = prom(0);
    for (std::size_t k = 1; k < peaks.size(); ++k) {
      const double pk = prom(k);
      if (pk < worst_p) {
        worst_p = pk;
        worst = k;
      }
    }
    if (worst_p > noise_floor) break;
    mins[worst] = std::min(mins[worst], mins[worst + 1]);
    mins.erase(mins.begin() + static_cast<std::ptrdiff_t>(worst) + 1);
    peaks.erase(peaks.begin() + static_cast<std::ptrdiff_t>(worst));
  }

  std::vector<Peak> out;
  out.reserve(peaks.size());
  for (std::size_t k = 0; k < peaks.size(); ++k)
    out.push_back({times[peaks[k]], values[peaks[k]], prom(k)});
  return out;
}

std::vector<Peak> extract_peaks(const Trajectory<4>& traj, int component,
                                double transient_fraction, double noise_floor) {
  if (component < 0 || component > 3)
    throw std::invalid_argument("extract_peaks: component index");
  std::vector<double> vals(traj.states.size());
  for (std::size_t i = 0; i < traj.states.size(); ++i)
    vals[i] = traj.states[i][static_cast<std::size_t>(component)];
  return extract_peaks(traj.times, vals, transient_fraction, noise_floor);
}

MmoSignature signature(const std::vector<Peak>& peaks, double large_threshold,
                       double small_threshold) {
  if (!(large_threshold > small_threshold && small_threshold > 0.0))
    throw std::invalid_argument("signature: need large > small > 0");

  std::vector<int> events;  // 1 = large, 0 = small
  events.reserve(peaks.size());
  for (const auto& p : peaks) {
    if (p.prominence >= large_threshold) events.push_back(1);
    else if (p.prominence >= small_threshold) events.push_back(0);
  }

  MmoSignature sig;
  std::size_t i = 0;
  while (i < events.size()) {
    MmoBlock b;
    while (i < events.size() && events[i] == 1) { ++b.large; ++i; }
    while (i < events.size() && events[i] == 0) { ++b.small; ++i; }
    sig.blocks.push_back(b);
  }
  return sig;
}

Classification classify_attractor(const Trajectory<4>& traj,
                                  const AnalysisConfig& cfg) {
  Classification out;
  if (traj.size() < 3) return out;

  const auto comp = static_cast<std::size_t>(cfg.component);
  const double t_cut =
      traj.times.front() +
      cfg.transient_fraction * (traj.times.back() - traj.times.front());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj.times[i] < t_cut) continue;
    lo = std::min(lo, traj.states[i][comp]);
    hi = std::max(hi, traj.states[i][comp]);
  }
  out.post_range = hi - lo;
  if (out.post_range < cfg.eq_tol) {
    out.cls = AttractorClass::Equilibrium;
    return out;
  }

  const auto peaks =
      extract_peaks(traj, cfg.component, cfg.transient_fraction, cfg.noise_floor);
  out.sig = signature(peaks, cfg.large_threshold, cfg.small_threshold);
  for (const auto& p : peaks) {
    if (p.prominence >= cfg.large_threshold) ++out.n_large;
    else if (p.prominence >= cfg.small_threshold) ++out.n_small;
  }

  if (out.n_large >= 1 && out.n_small >= 1 && out.sig.alternating())
    out.cls = AttractorClass::MMO;
  else if (out.n_large >= 1 && out.n_small == 0)
    out.cls = AttractorClass::Relaxation;
  else if (out.n_large == 0 && out.n_small >= 1)
    out.cls = AttractorClass::SmallCycle;
  else
    out.cls = AttractorClass::Unclassified;
  return out;
}

std::vector<SweepRow> sweep_c1(const SystemDefinition& sys,
                               const std::vector<double>& c1_values,
                               const SimConfig& sim, const AnalysisConfig& cfg,
                               int jobs) {
  if (c1_values.empty())
    throw std::invalid_argument("sweep_c1: empty c1 list");

  std::vector<SweepRow> rows(c1_values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= c1_values.size()) return;
      SweepRow& row = rows[i];
      row.c1 = c1_values[i];
      Params p = sim.params;
      p.c1 = row.c1;
      const auto traj =
          integrate<4>(full_field(sys, p),
                       StateVec<4>{sim.initial.x1, sim.initial.x2,
                                   sim.initial.y1, sim.initial.y2},
                       0.0, sim.t_end, sim.dt, sim.record_every);
      row.blew_up = traj.blew_up;
      row.final_state = traj.states.back();
      if (!traj.blew_up) row.result = classify_attractor(traj, cfg);
    }
  };

  unsigned n_threads = jobs > 0 ? static_cast<unsigned>(jobs)
                                : std::thread::hardware_concurrency();
  n_threads = std::max(1u, std::min<unsigned>(
                               n_threads, static_cast<unsigned>(rows.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned k = 0; k < n_threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

}  // namespace slowfast
