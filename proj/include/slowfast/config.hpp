#pragma once

#include <string>

#include "slowfast/fold.hpp"
#include "slowfast/mmo.hpp"
#include "slowfast/reduced.hpp"
#include "slowfast/system.hpp"

namespace slowfast {

/// Complete run configuration: system parameters, integration and analysis
/// settings, solver tolerances. Loadable from a flat key=value file; see the
/// README for the key list. Precedence is flag > file > default.
struct RunConfig {
  Params params;
  SimConfig sim;           // params member mirrored before use
  AnalysisConfig analysis;
  FoldOptions fold;
  ReducedOptions reduced;

  void sync() { sim.params = params; }
};

/// Parses a key=value config file ('#' comments, blank lines allowed).
/// Unknown keys and malformed values are errors.
RunConfig load_run_config(const std::string& path);

/// Applies one key=value assignment; used both by the file loader and by
/// command-line overrides.
void apply_config_entry(RunConfig& cfg, const std::string& key,
                        const std::string& value);

}  // namespace slowfast
