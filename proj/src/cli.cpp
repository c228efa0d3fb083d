#include "swp/io/cli.hpp"

#include <cstdlib>
#include <sstream>

#include <CLI11.hpp>

#include "swp/io/csv.hpp"
#include "swp/io/scenario.hpp"
#include "swp/io/svg.hpp"
#include "swp/optimizer.hpp"
#include "swp/swp.hpp"

namespace swp::cli {

namespace fs = std::filesystem;
using io::Scenario;
using io::ScenarioModel;

namespace {

struct Options {
  std::string scenario;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<std::string> out;
  double tol = kSteadyStateTolerance;
  bool quiet = false;
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

std::string percent(double fraction) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(1);
  s << 100.0 * fraction << '%';
  return s.str();
}

/// Report sink: regular lines honor --quiet, warnings always go to stderr.
struct Reporter {
  std::ostream& out;
  std::ostream& err;
  bool quiet;

  template <typename... Parts>
  void line(const Parts&... parts) {
    if (quiet) return;
    (out << ... << parts) << '\n';
  }
  template <typename... Parts>
  void warn(const Parts&... parts) {
    err << "warning: ";
    (err << ... << parts) << '\n';
  }
};

Scenario load(const Options& opt, Reporter& report) {
  Scenario s = io::load_scenario(opt.scenario);
  for (const auto& notice : s.notices) report.line("notice: ", notice);
  return s;
}

void apply_overrides(Scenario& s, const Options& opt) {
  if (opt.dt) {
    s.dt = *opt.dt;
    s.dt_defaulted = false;
  }
  if (opt.t_end) s.t_end = *opt.t_end;
  io::check_time_step(s);
}

void require_model(const Scenario& s, bool ok, const char* command) {
  if (!ok) {
    throw Error(ErrorCode::Configuration,
                std::string(command) + " does not apply to a " + io::to_string(s.model) + "-model scenario", "model");
  }
}

void report_written(Reporter& report, const fs::path& dir) { report.line("output: ", dir.string()); }

void assumption_warning(Reporter& report, const BudgetParams<double>& params) {
  const auto check = check_budget_assumption(params);
  if (!check.holds) {
    report.warn("mu*omega >= omega' fails at z = ", num(params.grid().age(check.worst_node)),
                " (margin ", num(check.margin), "); entropy decay is not guaranteed");
  }
}

int cmd_equilibrium(const Options& opt, Reporter& report) {
  Scenario s = load(opt, report);
  require_model(s, s.model == ScenarioModel::Saturating, "equilibrium");
  const auto eq = equilibria(s.saturating_params());
  report.line("scenario: ", s.name);
  report.line("beta = ", num(eq.beta));
  report.line("alpha = ", num(eq.alpha));
  report.line("P_eq = ", num(eq.P_eq), ", regime = ", to_string(eq.regime));
  report.line("technical_window = ", eq.technical_window ? "true" : "false");
  if (eq.regime == Regime::ExtinctionOnly) {
    report.line("beta <= 1: zero is the only equilibrium");
  } else if (!eq.technical_window) {
    report.warn("beta = ", num(eq.beta), " >= 9 lies outside the window where convergence to P_eq is proven",
                " (technical_window = false)");
  }
  const fs::path dir = output_directory(opt.out, s.name);
  fs::create_directories(dir);
  io::write_profile(dir / "rho_eq.csv", eq.rho_eq);
  io::render_equilibrium_plot(eq, dir);
  report_written(report, dir);
  return 0;
}

SimulationResult<double> thin(const SimulationResult<double>& full, std::size_t stride) {
  SimulationResult<double> out = full;
  out.snapshots.clear();
  const std::size_t last = full.snapshots.size() - 1;
  for (std::size_t k = 0; k <= last; ++k) {
    if (k == 0 || k == last || (stride > 0 && k % stride == 0)) out.snapshots.push_back(full.snapshots[k]);
  }
  return out;
}

int cmd_simulate(const Options& opt, Reporter& report) {
  Scenario s = load(opt, report);
  require_model(s, s.model != ScenarioModel::Optimize, "simulate");
  apply_overrides(s, opt);
  const auto& rho0 = s.initial_state();

  SimulationResult<double> result;
  std::optional<BudgetParams<double>> budget;
  if (s.model == ScenarioModel::Saturating) {
    result = simulate_saturating(s.saturating_params(), rho0, s.dt, s.t_end);
  } else {
    budget = s.budget_params();
    result = simulate_budget(*budget, rho0, s.dt, s.t_end);
  }

  report.line("scenario: ", s.name, " (", io::to_string(s.model), " model)");
  report.line("dt = ", num(s.dt), s.dt_defaulted ? " (default)" : "", ", steps = ", result.steps(),
              ", t_end = ", num(result.times.back()));
  report.line("headcount: P(0) = ", num(result.headcount.front()), ", P(T) = ", num(result.headcount.back()));

  const auto settled = detect_steady_state(result, opt.tol);
  const double p0 = result.headcount.front();
  const bool extinct = result.headcount.back() <= opt.tol * p0;
  if (settled) {
    report.line("time to equilibrium: ", num(*settled), extinct && p0 > 0 ? " (extinction)" : "", " (tol ",
                num(opt.tol), ")");
  } else {
    report.line("time to equilibrium: not reached by t_end (tol ", num(opt.tol), ")");
  }

  if (budget) {
    const double drift = budget_drift(result);
    report.line("budget drift: ", num(drift), drift < 1e-10 ? " (< 1e-10)" : " (exceeds 1e-10)");
    const double rise = max_entropy_increase(result);
    if (rise <= kEntropySlack) {
      report.line("entropy: nonincreasing (largest relative step increase ", num(rise), ")");
    } else {
      report.line("entropy: increases (largest relative step increase ", num(rise), ")");
    }
    assumption_warning(report, *budget);
    const auto lowest = std::min_element(result.hiring.begin(), result.hiring.end());
    if (*lowest < 0) {
      report.warn("hiring rate turns negative (", num(*lowest), " at t = ",
                  num(result.times[static_cast<std::size_t>(lowest - result.hiring.begin())]),
                  "): the flat budget forces departures beyond attrition");
    }
  }

  std::size_t stride = 0;
  if (s.snapshot_every > 0) stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(s.snapshot_every / s.dt)));
  const auto written = thin(result, stride);
  const fs::path dir = output_directory(opt.out, s.name);
  io::write_timeseries(written, dir);
  io::render_simulation_plots(written, dir);
  report_written(report, dir);
  return 0;
}

int cmd_optimize(const Options& opt, Reporter& report) {
  Scenario s = load(opt, report);
  require_model(s, s.model == ScenarioModel::Optimize, "optimize");
  const auto& omega = *s.omega;
  const auto curves = optimizer_curves(omega, *s.mu);
  const auto j0 = optimal_hiring_index(curves);
  const auto policy = optimal_structure(curves, s.grid.age(j0), *s.knowledge);

  // Nodes 0 and 1 carry the same tails (node 0 has no quadrature weight), so they never count as a tie.
  bool tie = false;
  const double best = curves.d[j0];
  for (Eigen::Index j = j0 == 0 ? 2 : j0 + 1; j < curves.d.size(); ++j) {
    tie = tie || std::abs(curves.d[j] - best) <= kTieTolerance * std::abs(best);
  }

  report.line("scenario: ", s.name);
  report.line("z0 = ", num(policy.z0), tie ? " (tie-break)" : "", ", case = ", to_string(policy.policy_case));
  report.line("b = ", num(policy.b));
  report.line("C = E*d(z0) = ", num(policy.C), " (E = ", num(policy.E), ", d(z0) = ", num(curves.d[j0]), ")");
  report.line("headcount = ", num(policy.headcount));
  report.line("hiring = ", num(policy.hiring.magnitude), " per year at age ", num(policy.hiring.age));
  if (policy.degenerate_support) {
    report.warn("degenerate support: the optimal workforce is hired at z_max and occupies only the last age cell");
  }
  if (s.rho0) {
    const auto savings = policy_savings(PopulationState<double>{0.0, *s.rho0}, omega, policy);
    const double knowledge = integrate(s.grid, s.grid.ages().cwiseProduct(s.rho0->values));
    report.line("current: cost = ", num(savings.current_cost), ", knowledge = ", num(knowledge));
    report.line("saving = ", percent(savings.saving_fraction), " (optimal cost ", num(savings.optimal_cost), ")");
  }

  const fs::path dir = output_directory(opt.out, s.name);
  fs::create_directories(dir);
  io::Table rows;
  for (Eigen::Index j = 0; j < curves.d.size(); ++j) {
    rows.push_back({s.grid.age(j), curves.d[j], curves.f[j], curves.g[j]});
  }
  io::write_csv(dir / "d.csv", {"z", "d", "f", "g"}, rows);
  io::write_profile(dir / "rho_star.csv", policy.rho_star);
  io::render_policy_plots(curves, policy, omega, dir);
  report_written(report, dir);
  return 0;
}

int cmd_validate(const Options& opt, Reporter& report) {
  Scenario s = load(opt, report);
  apply_overrides(s, opt);
  report.line("OK");
  report.line("scenario: ", s.name, " (", io::to_string(s.model), " model)");
  report.line("grid: [", num(s.grid.z_min), ", ", num(s.grid.z_max), "], dz = ", num(s.grid.dz), ", ",
              s.grid.nodes(), " nodes");
  switch (s.model) {
    case ScenarioModel::Saturating: {
      const auto eq = equilibria(s.saturating_params());
      report.line("beta = ", num(eq.beta), ", alpha = ", num(eq.alpha), ", P_eq = ", num(eq.P_eq), ", regime = ",
                  to_string(eq.regime));
      if (eq.regime == Regime::Bistable && !eq.technical_window) {
        report.warn("beta = ", num(eq.beta), " >= 9 lies outside the window where convergence to P_eq is proven");
      }
      break;
    }
    case ScenarioModel::Budget: {
      report.line("beta = ", num(s.beta));
      assumption_warning(report, s.budget_params());
      break;
    }
    case ScenarioModel::Optimize:
      report.line("E = ", num(*s.knowledge));
      break;
  }
  if (s.model != ScenarioModel::Optimize) {
    report.line("dt = ", num(s.dt), s.dt_defaulted ? " (default)" : "", ", CFL margin = ", num(io::cfl_margin(s)),
                ", admissible dt <= ", num(io::max_time_step(s)));
  }
  return 0;
}

}  // namespace

fs::path output_directory(const std::optional<std::string>& out_flag, const std::string& scenario_name) {
  if (out_flag) return *out_flag;
  const char* root = std::getenv("SWP_OUT_DIR");
  const fs::path base = root && *root ? fs::path(root) : fs::path("swp-out");
  return base / scenario_name;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Strategic workforce planning: age-structured headcount models and hiring-age optimization", "swp"};
  app.require_subcommand(1);
  Options opt;

  auto add = [&](const char* name, const char* help, bool time_flags) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--scenario", opt.scenario, "Scenario file (JSON)")->required();
    if (time_flags) {
      sub->add_option("--dt", opt.dt, "Time step override (years)");
      sub->add_option("--t-end", opt.t_end, "Horizon override (years)");
    }
    sub->add_option("--out", opt.out, "Output directory (default $SWP_OUT_DIR/<scenario name>)");
    sub->add_option("--tol", opt.tol, "Steady-state tolerance (relative L1)")->capture_default_str();
    sub->add_flag("--quiet", opt.quiet, "Suppress the report on stdout");
    return sub;
  };
  CLI::App* equilibrium = add("equilibrium", "Equilibria of the saturating model", false);
  CLI::App* simulate = add("simulate", "Run the transport model over time", true);
  CLI::App* optimize = add("optimize", "Cost-minimal hiring age and age structure", false);
  CLI::App* validate = add("validate", "Static scenario validation", true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  Reporter report{out, err, opt.quiet};
  try {
    if (*equilibrium) return cmd_equilibrium(opt, report);
    if (*simulate) return cmd_simulate(opt, report);
    if (*optimize) return cmd_optimize(opt, report);
    if (*validate) return cmd_validate(opt, report);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error [io]: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace swp::cli
