#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "slowfast/system.hpp"

namespace slowfast {

template <std::size_t N>
using StateVec = std::array<double, N>;

/// Classical 4-stage Runge-Kutta update. The field is any callable
/// (double t, StateVec<N>) -> StateVec<N>.
template <std::size_t N, class Field>
StateVec<N> rk4_step(Field&& f, const StateVec<N>& s, double t, double dt) {
  StateVec<N> k1 = f(t, s);
  StateVec<N> u;
  for (std::size_t i = 0; i < N; ++i) u[i] = s[i] + 0.5 * dt * k1[i];
  StateVec<N> k2 = f(t + 0.5 * dt, u);
  for (std::size_t i = 0; i < N; ++i) u[i] = s[i] + 0.5 * dt * k2[i];
  StateVec<N> k3 = f(t + 0.5 * dt, u);
  for (std::size_t i = 0; i < N; ++i) u[i] = s[i] + dt * k3[i];
  StateVec<N> k4 = f(t + dt, u);
  StateVec<N> out;
  for (std::size_t i = 0; i < N; ++i)
    out[i] = s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

template <std::size_t N>
struct Trajectory {
  std::vector<double> times;
  std::vector<StateVec<N>> states;
  double dt = 0.0;
  int record_every = 1;
  bool blew_up = false;
  double blowup_time = std::numeric_limits<double>::quiet_NaN();

  std::size_t size() const { return times.size(); }
};

/// Fixed-step integration over [t0, t_end] with ceil((t_end-t0)/dt) steps,
/// recording the initial state, every record_every-th step and the final
/// state. A non-finite state aborts with the partial trajectory flagged.
template <std::size_t N, class Field>
Trajectory<N> integrate(Field&& f, const StateVec<N>& s0, double t0,
                        double t_end, double dt, int record_every = 1) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be > 0");
  if (t_end < t0) throw std::invalid_argument("integrate: t_end < t0");
  if (record_every < 1)
    throw std::invalid_argument("integrate: record_every must be >= 1");

  const auto n_steps =
      static_cast<long long>(std::ceil((t_end - t0) / dt - 1e-12));

  Trajectory<N> traj;
  traj.dt = dt;
  traj.record_every = record_every;
  traj.times.reserve(static_cast<std::size_t>(n_steps / record_every) + 2);
  traj.states.reserve(static_cast<std::size_t>(n_steps / record_every) + 2);
  traj.times.push_back(t0);
  traj.states.push_back(s0);

  StateVec<N> s = s0;
  for (long long k = 0; k < n_steps; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    s = rk4_step<N>(f, s, t, dt);
    bool finite = true;
    for (double u : s) finite = finite && std::isfinite(u);
    if (!finite) {
      traj.blew_up = true;
      traj.blowup_time = t + dt;
      return traj;
    }
    if ((k + 1) % record_every == 0 || k + 1 == n_steps) {
      traj.times.push_back(t0 + static_cast<double>(k + 1) * dt);
      traj.states.push_back(s);
    }
  }
  return traj;
}

/// Slow-time vector field (f/eps, g) of a system definition, usable with
/// integrate<4>.
inline auto full_field(const SystemDefinition& sys, const Params& p) {
  return [&sys, p](double, const StateVec<4>& u) -> StateVec<4> {
    const State s{u[0], u[1], u[2], u[3]};
    const Vec2 f = sys.fast_rhs(s, p);
    const Vec2 g = sys.slow_rhs(s, p);
    return {f[0] / p.epsilon, f[1] / p.epsilon, g[0], g[1]};
  };
}

/// Crude step-size sanity margin: |fastest eigenvalue| * dt of the fast
/// subsystem at a state. RK4 on this problem wants the value below ~2.5.
inline double stability_margin(const SystemDefinition& sys, const State& s,
                               const Params& p, double dt) {
  const Mat2 a = sys.fast_jacobian(s, p);
  const Eig2 e = eig2(a);
  const double rho = e.real
                         ? std::max(std::fabs(e.big), std::fabs(e.small))
                         : std::hypot(0.5 * e.tr, std::sqrt(-e.disc) * 0.5);
  return rho / p.epsilon * dt;
}

}  // namespace slowfast
