#pragma once

#include <cstdint>

#include "slowfast/system.hpp"

namespace slowfast::test {

// Deterministic LCG so property-style tests are reproducible.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed) {}
  double uniform(double lo, double hi) {
    s_ = s_ * 6364136223846793005ull + 1442695040888963407ull;
    const double u = static_cast<double>(s_ >> 11) / 9007199254740992.0;
    return lo + (hi - lo) * u;
  }

 private:
  std::uint64_t s_;
};

inline Params paper_params() {
  Params p;
  p.epsilon = 0.1;
  p.alpha1 = p.alpha2 = p.beta1 = p.beta2 = 0.01;
  p.c1 = -0.99;
  p.c2 = -1.5;
  return p;
}

inline Params uncoupled_params() {
  Params p = paper_params();
  p.alpha1 = p.alpha2 = p.beta1 = p.beta2 = 0.0;
  return p;
}

}  // namespace slowfast::test
