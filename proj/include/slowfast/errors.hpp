#pragma once

#include <stdexcept>
#include <string>

namespace slowfast {

// Newton / continuation failures (CLI exit code 2).
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A requested bracket does not contain the sought root / sign change (exit code 3).
struct BracketError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation left the validity region of the local chart.
struct ChartError : SolverError {
  using SolverError::SolverError;
};

// Non-finite value produced by a right-hand-side evaluation.
struct EvaluationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace slowfast
