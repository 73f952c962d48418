#include "slowfast/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace slowfast {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last)
    throw std::invalid_argument("config: bad numeric value for '" + key +
                                "': " + value);
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  int out = 0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last)
    throw std::invalid_argument("config: bad integer value for '" + key +
                                "': " + value);
  return out;
}

}  // namespace

void apply_config_entry(RunConfig& cfg, const std::string& key,
                        const std::string& value) {
  auto d = [&] { return parse_double(key, value); };
  auto n = [&] { return parse_int(key, value); };

  // system parameters
  if (key == "epsilon") cfg.params.epsilon = d();
  else if (key == "alpha1") cfg.params.alpha1 = d();
  else if (key == "alpha2") cfg.params.alpha2 = d();
  else if (key == "beta1") cfg.params.beta1 = d();
  else if (key == "beta2") cfg.params.beta2 = d();
  else if (key == "c1") cfg.params.c1 = d();
  else if (key == "c2") cfg.params.c2 = d();
  // integration
  else if (key == "dt") cfg.sim.dt = d();
  else if (key == "t_end") cfg.sim.t_end = d();
  else if (key == "record_every") cfg.sim.record_every = n();
  else if (key == "x1_0") cfg.sim.initial.x1 = d();
  else if (key == "x2_0") cfg.sim.initial.x2 = d();
  else if (key == "y1_0") cfg.sim.initial.y1 = d();
  else if (key == "y2_0") cfg.sim.initial.y2 = d();
  // analysis
  else if (key == "transient_fraction") cfg.analysis.transient_fraction = d();
  else if (key == "noise_floor") cfg.analysis.noise_floor = d();
  else if (key == "large_threshold") cfg.analysis.large_threshold = d();
  else if (key == "small_threshold") cfg.analysis.small_threshold = d();
  else if (key == "eq_tol") cfg.analysis.eq_tol = d();
  // fold solver
  else if (key == "newton_tol") cfg.fold.newton_tol = d();
  else if (key == "max_iter") { cfg.fold.max_iter = n(); cfg.reduced.max_iter = n(); }
  else if (key == "lambda_floor") cfg.fold.lambda_floor = d();
  else if (key == "kappa_floor") cfg.fold.kappa_floor = d();
  else if (key == "branch_x1_min") cfg.fold.x1_min = d();
  else if (key == "branch_x1_max") cfg.fold.x1_max = d();
  else if (key == "branch_x2_max") cfg.fold.x2_max = d();
  else if (key == "seed_x1") cfg.fold.seed[0] = d();
  else if (key == "seed_x2") cfg.fold.seed[1] = d();
  else if (key == "seed_y1") cfg.fold.seed[2] = d();
  else if (key == "seed_y2") cfg.fold.seed_y2 = d();
  // reduced dynamics
  else if (key == "root_tol") cfg.reduced.root_tol = d();
  else if (key == "partial_step") cfg.reduced.partial_step = d();
  else if (key == "chart_radius") cfg.reduced.chart_radius = d();
  else if (key == "degen_tol") cfg.reduced.degen_tol = d();
  else if (key == "nu_max") cfg.reduced.nu_max = d();
  else if (key == "bisect_tol_c1") cfg.reduced.bisect_tol_c1 = d();
  else if (key == "bracket_grid") cfg.reduced.bracket_grid = n();
  else if (key == "side_delta") cfg.reduced.side_delta = d();
  else
    throw std::invalid_argument("config: unknown key '" + key + "'");
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);

  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << "config: " << path << ":" << lineno << ": expected key=value";
      throw std::invalid_argument(os.str());
    }
    apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.sync();
  return cfg;
}

}  // namespace slowfast
