#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slowfast/config.hpp"
#include "slowfast/csv.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/fold.hpp"
#include "slowfast/integrate.hpp"
#include "slowfast/mmo.hpp"
#include "slowfast/reduced.hpp"
#include "slowfast/system.hpp"

namespace {

using namespace slowfast;

struct CliExit {
  int code;
};

struct IoError {
  std::string what;
};

// Output sink: "-" means stdout.
class Out {
 public:
  explicit Out(const std::string& path) {
    if (path == "-") {
      os_ = &std::cout;
      return;
    }
    file_.open(path, std::ios::binary);
    if (!file_) throw IoError{"cannot open output file: " + path};
    os_ = &file_;
  }
  std::ostream& stream() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_ = nullptr;
};

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> sets;  // key=value overrides

  std::optional<double> epsilon, alpha1, alpha2, beta1, beta2, c1, c2;
  std::optional<double> dt, t_end;
  std::optional<int> record_every;

  RunConfig build() const {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_run_config(config_path);
    auto put = [&](const char* key, const std::optional<double>& v) {
      if (v) apply_config_entry(cfg, key, format_double(*v));
    };
    put("epsilon", epsilon);
    put("alpha1", alpha1);
    put("alpha2", alpha2);
    put("beta1", beta1);
    put("beta2", beta2);
    put("c1", c1);
    put("c2", c2);
    put("dt", dt);
    put("t_end", t_end);
    if (record_every)
      apply_config_entry(cfg, "record_every", std::to_string(*record_every));
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("--set expects key=value, got: " + kv);
      apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    cfg.sync();
    cfg.params.validate();
    return cfg;
  }
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_path, "key=value config file");
  sub->add_option("--set", args.sets,
                  "override any config key (repeatable), e.g. --set c1=-0.99");
  sub->add_option("--epsilon", args.epsilon, "timescale ratio");
  sub->add_option("--alpha1", args.alpha1, "fast coupling 1->2");
  sub->add_option("--alpha2", args.alpha2, "fast coupling 2->1");
  sub->add_option("--beta1", args.beta1, "slow coupling 1->2");
  sub->add_option("--beta2", args.beta2, "slow coupling 2->1");
  sub->add_option("--c1", args.c1, "nullcline position of oscillator 1");
  sub->add_option("--c2", args.c2, "nullcline position of oscillator 2");
  sub->add_option("--dt", args.dt, "integration step");
  sub->add_option("--t-end", args.t_end, "integration end time");
  sub->add_option("--record-every", args.record_every,
                  "record every n-th integration step");
}

int run_verify(const RunConfig& cfg) {
  int failures = 0;
  auto line = [&](const char* name, bool ok, const std::string& detail) {
    std::cout << (ok ? "[ok]   " : "[FAIL] ") << name << ": " << detail << "\n";
    if (!ok) ++failures;
  };

  const SystemDefinition sys = fhn_system();

  {
    const State probes[] = {{-1.0, -1.5, -2.0, -1.125},
                            {0.3, -1.2, 0.1, -0.9},
                            {-0.7, 1.4, -0.5, 2.0}};
    double worst = 0.0;
    bool ok = true;
    for (const auto& s : probes) {
      const auto rep = fd_check(sys, s, cfg.params);
      ok = ok && rep.pass;
      worst = std::max(worst, rep.max_rel_err);
    }
    line("derivative audit", ok, "max relative error " + format_double(worst));
  }

  {
    auto field = [](double, const StateVec<1>& u) -> StateVec<1> {
      return {-u[0]};
    };
    double errs[3];
    const double dts[3] = {1e-2, 5e-3, 2.5e-3};
    for (int i = 0; i < 3; ++i) {
      const auto traj = integrate<1>(field, {1.0}, 0.0, 1.0, dts[i], 1000000);
      errs[i] = std::fabs(traj.states.back()[0] - std::exp(-1.0));
    }
    const double r1 = errs[0] / errs[1], r2 = errs[1] / errs[2];
    const bool ok = std::fabs(r1 - 16.0) < 3.2 && std::fabs(r2 - 16.0) < 3.2;
    line("rk4 order-4 scaling", ok,
         "error ratios " + format_double(r1) + ", " + format_double(r2));
  }

  {
    Params p0 = cfg.params;
    p0.alpha1 = p0.alpha2 = p0.beta1 = p0.beta2 = 0.0;
    bool ok = false;
    std::string detail;
    try {
      const auto fp =
          solve_fold_point(sys, -1.125, {-1.0, -1.5, -2.0}, p0, cfg.fold);
      const double err = std::max(
          {std::fabs(fp.x1_star + 1.0), std::fabs(fp.x2_star + 1.5),
           std::fabs(fp.y1_star + 2.0), std::fabs(fp.lambda + 3.75),
           std::fabs(fp.K - 6.0)});
      ok = err < 1e-10;
      detail = "max deviation " + format_double(err);
    } catch (const std::exception& e) {
      detail = e.what();
    }
    line("uncoupled fold closed form", ok, detail);
  }

  {
    bool ok = false;
    std::string detail;
    try {
      const auto curve = fold_curve(sys, -1.3, -0.9, 41, cfg.fold.seed,
                                    cfg.params, cfg.fold);
      double worst = 0.0;
      for (const auto& fp : curve.points) {
        const double lam = fhn::dF(fp.x1_star) + fhn::dF(fp.x2_star) -
                           cfg.params.alpha1 - cfg.params.alpha2;
        worst = std::max(worst, std::fabs(fp.lambda - lam));
        worst = std::max(worst, fp.residual);
      }
      ok = worst < 1e-8;
      detail = "max eigenvalue deviation " + format_double(worst);
    } catch (const std::exception& e) {
      detail = e.what();
    }
    line("fold-curve eigenvalue identity", ok, detail);
  }

  {
    bool ok = false;
    std::string detail;
    try {
      const ReducedChart chart(sys, cfg.params, cfg.fold, cfg.reduced);
      const double x1 = 0.05;
      const double gap =
          std::fabs(chart.g1(x1, -1.125) - fhn_g1_explicit(chart, x1, -1.125));
      ok = gap < 10.0 * x1 * x1;
      detail = "generic vs explicit g1 gap " + format_double(gap);
    } catch (const std::exception& e) {
      detail = e.what();
    }
    line("reduced-route agreement", ok, detail);
  }

  std::cout << (failures == 0 ? "verify: all checks passed\n"
                              : "verify: checks failed\n");
  return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "slowfast: fold curves, folded singularities and mixed-mode\n"
      "oscillations of two coupled slow-fast oscillators"};
  app.require_subcommand(1);

  try {
    // fold-curve
    auto* sc_curve = app.add_subcommand(
        "fold-curve", "solve the fold curve on a uniform y2 grid");
    static CommonArgs a_curve;
    add_common(sc_curve, a_curve);
    static double y2_min = -1.3, y2_max = -0.9;
    static int n_pts = 41;
    static std::string curve_out = "-";
    sc_curve->add_option("--y2-min", y2_min, "lower end of the y2 range");
    sc_curve->add_option("--y2-max", y2_max, "upper end of the y2 range");
    sc_curve->add_option("-n,--points", n_pts, "number of grid points");
    sc_curve->add_option("-o,--out", curve_out, "output CSV (- for stdout)");
    sc_curve->callback([&] {
      const RunConfig cfg = a_curve.build();
      const auto curve = fold_curve(fhn_system(), y2_min, y2_max, n_pts,
                                    cfg.fold.seed, cfg.params, cfg.fold);
      Out out(curve_out);
      write_fold_curve_csv(out.stream(), curve);
      std::cerr << "fold-curve: " << curve.points.size()
                << " points, max second difference "
                << format_double(curve.max_second_diff) << "\n";
    });

    // singularity
    auto* sc_sing = app.add_subcommand(
        "singularity",
        "folded singularity and ordinary equilibrium of the reduced flow");
    static CommonArgs a_sing;
    add_common(sc_sing, a_sing);
    static std::string sing_out = "-";
    static std::optional<double> y2_lo, y2_hi;
    sc_sing->add_option("--y2-lo", y2_lo, "optional y2 bracket, lower end");
    sc_sing->add_option("--y2-hi", y2_hi, "optional y2 bracket, upper end");
    sc_sing->add_option("-o,--out", sing_out, "output report (- for stdout)");
    sc_sing->callback([&] {
      const RunConfig cfg = a_sing.build();
      const ReducedChart chart(fhn_system(), cfg.params, cfg.fold, cfg.reduced);
      std::optional<std::pair<double, double>> bracket;
      if (y2_lo && y2_hi) bracket = std::make_pair(*y2_lo, *y2_hi);
      const auto fs = find_folded_singularity(chart, bracket);
      const auto eq = find_ordinary_equilibrium(chart);
      Out out(sing_out);
      write_singularity_report(out.stream(), fs, eq);
    });

    // fsn2
    auto* sc_fsn = app.add_subcommand(
        "fsn2", "detect the FSN II transcritical transition in c1");
    static CommonArgs a_fsn;
    add_common(sc_fsn, a_fsn);
    static double c1_min = -1.0, c1_max = -0.98;
    static std::string fsn_out = "-";
    static std::string fsn_csv;
    sc_fsn->add_option("--c1-min", c1_min, "bracket lower end");
    sc_fsn->add_option("--c1-max", c1_max, "bracket upper end");
    sc_fsn->add_option("-o,--out", fsn_out, "report output (- for stdout)");
    sc_fsn->add_option("--csv", fsn_csv, "also write a one-row CSV summary");
    sc_fsn->callback([&] {
      const RunConfig cfg = a_fsn.build();
      const SystemDefinition sys = fhn_system();
      TranscriticalReport rep =
          detect_fsn2(sys, cfg.params, {c1_min, c1_max}, cfg.fold, cfg.reduced);
      verify_fhn_hypotheses(sys, cfg.params, rep, cfg.fold, cfg.reduced);
      {
        Out out(fsn_out);
        write_fsn2_report(out.stream(), rep);
      }
      if (!fsn_csv.empty()) {
        Out out(fsn_csv);
        write_fsn2_csv(out.stream(), rep);
      }
      if (!rep.confirmed) {
        for (const auto& c : rep.checks)
          if (!c.pass)
            std::cerr << "fsn2: hypothesis failed: " << c.name
                      << " (margin " << format_double(c.margin) << ")\n";
        throw CliExit{4};
      }
      std::cerr << "fsn2: transcritical confirmed at c1_star="
                << format_double(rep.c1_star) << "\n";
    });

    // simulate
    auto* sc_sim = app.add_subcommand(
        "simulate", "integrate the full 4D system and write the trajectory");
    static CommonArgs a_sim;
    add_common(sc_sim, a_sim);
    static std::string sim_out = "-";
    sc_sim->add_option("-o,--out", sim_out, "trajectory CSV (- for stdout)");
    sc_sim->callback([&] {
      const RunConfig cfg = a_sim.build();
      const SystemDefinition sys = fhn_system();
      const double margin =
          stability_margin(sys, cfg.sim.initial, cfg.params, cfg.sim.dt);
      if (margin > 2.5)
        std::cerr << "simulate: warning: |lambda_fast|*dt = "
                  << format_double(margin)
                  << " exceeds the RK4 comfort zone (2.5)\n";
      const auto traj = integrate<4>(
          full_field(sys, cfg.params),
          StateVec<4>{cfg.sim.initial.x1, cfg.sim.initial.x2,
                      cfg.sim.initial.y1, cfg.sim.initial.y2},
          0.0, cfg.sim.t_end, cfg.sim.dt, cfg.sim.record_every);
      Out out(sim_out);
      write_trajectory_csv(out.stream(), traj);
      if (traj.blew_up) {
        std::cerr << "simulate: blow-up at t="
                  << format_double(traj.blowup_time)
                  << ", partial trajectory written\n";
        throw CliExit{2};
      }
    });

    // sweep
    auto* sc_sweep = app.add_subcommand(
        "sweep", "classify the attractor for a list of c1 values");
    static CommonArgs a_sweep;
    add_common(sc_sweep, a_sweep);
    static std::string sweep_list;
    static std::optional<double> sweep_from, sweep_to;
    static int sweep_steps = 0;
    static int jobs = 0;
    static std::string sweep_out = "-";
    sc_sweep->add_option("--c1-list", sweep_list,
                         "comma-separated c1 values, e.g. -0.99,-0.9883");
    sc_sweep->add_option("--c1-from", sweep_from, "uniform sweep start");
    sc_sweep->add_option("--c1-to", sweep_to, "uniform sweep end");
    sc_sweep->add_option("--c1-steps", sweep_steps, "uniform sweep point count");
    sc_sweep->add_option("-j,--jobs", jobs,
                         "worker threads (default: hardware concurrency)");
    sc_sweep->add_option("-o,--out", sweep_out, "sweep CSV (- for stdout)");
    sc_sweep->callback([&] {
      const RunConfig cfg = a_sweep.build();
      std::vector<double> values;
      if (!sweep_list.empty()) {
        std::stringstream ss(sweep_list);
        std::string tok;
        while (std::getline(ss, tok, ','))
          values.push_back(std::stod(tok));
      } else if (sweep_from && sweep_to && sweep_steps >= 2) {
        for (int i = 0; i < sweep_steps; ++i)
          values.push_back(*sweep_from +
                           (*sweep_to - *sweep_from) * i / (sweep_steps - 1));
      } else {
        throw std::invalid_argument(
            "sweep: give --c1-list or --c1-from/--c1-to/--c1-steps");
      }
      const auto rows =
          sweep_c1(fhn_system(), values, cfg.sim, cfg.analysis, jobs);
      Out out(sweep_out);
      write_sweep_csv(out.stream(), rows);
    });

    // verify
    auto* sc_verify = app.add_subcommand(
        "verify", "run the built-in numerical self-checks");
    static CommonArgs a_verify;
    add_common(sc_verify, a_verify);
    sc_verify->callback([&] {
      const int rc = run_verify(a_verify.build());
      if (rc != 0) throw CliExit{rc};
    });

    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const CliExit& e) {
    return e.code;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what << "\n";
    return 5;
  } catch (const BracketError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const SolverError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
