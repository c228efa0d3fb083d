#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "swp/budget.hpp"
#include "swp/grid.hpp"
#include "swp/saturating.hpp"

namespace swp::io {

using Grid = AgeGrid<double>;
using Profile = AgeProfile<double>;

enum class ScenarioModel { Saturating, Budget, Optimize };

const char* to_string(ScenarioModel m);

/// How the saturating model's pressure constant was specified.
enum class Calibration { None, Alpha, EquilibriumTarget };

/// A fully validated scenario: every profile is tabulated on `grid`.
struct Scenario {
  std::string name;
  ScenarioModel model = ScenarioModel::Saturating;
  Grid grid;
  double dt = 0;
  bool dt_defaulted = false;
  double t_end = 0;
  double snapshot_every = 0;  // years between written profile snapshots; 0 writes initial and final only

  Calibration calibration = Calibration::None;
  double alpha = 0;  // resolved pressure constant (saturating)
  double p_eq = 0;   // equilibrium target when calibration == EquilibriumTarget
  double beta = 0;   // recruitment index (saturating, budget)
  std::optional<double> knowledge;  // E (optimize)

  std::optional<Profile> mu;
  std::optional<Profile> gamma;
  std::optional<Profile> omega;
  std::optional<Profile> rho0;

  std::vector<std::string> notices;
  std::filesystem::path base_dir;

  SaturatingParams<double> saturating_params() const;
  BudgetParams<double> budget_params() const;
  /// Initial density; throws MissingField when absent.
  const Profile& initial_state() const;
};

/// Parses and validates a scenario document. Relative profile paths resolve against `base_dir`.
Scenario parse_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir);

Scenario load_scenario(const std::filesystem::path& path);

/// Serializes a scenario with every profile inlined at the grid nodes.
nlohmann::json scenario_to_json(const Scenario& scenario);
void write_scenario(const Scenario& scenario, const std::filesystem::path& path);

/// Re-checks dt against the model's CFL condition (throws CflViolation).
void check_time_step(const Scenario& scenario);

/// Largest admissible dt for the scenario's model.
double max_time_step(const Scenario& scenario);

/// 1 - dt/dz for the saturating scheme, 1 - max(mu) dt - dt/dz for the budget scheme.
double cfl_margin(const Scenario& scenario);

/// Tabulates a profile spec on the grid. Accepted forms:
///   number | {"constant": v} | {"linear": [a, b]} (a + b z) | {"polynomial": [c0, c1, ...]}
///   | {"piecewise": [[z, v], ...]} | {"csv": "file.csv"}
///   | {"gaussian": [mean, sd]} (unnormalized bell) | {"exponential": [z_ref, length]} (exp((z - z_ref)/length))
///   | {"sum": [spec, ...]}
/// with optional "scale" (multiplier) and, for densities, "headcount" (rescale to that integral).
Profile resolve_profile(const nlohmann::json& spec, const Grid& grid, const std::filesystem::path& base_dir,
                        const std::string& field);

/// Reads a two-column `z,value` CSV with a header line.
std::vector<std::pair<double, double>> read_profile_csv(const std::filesystem::path& path);

/// Linear interpolation of (z, value) points onto the grid nodes.
Profile interpolate_onto(const std::vector<std::pair<double, double>>& points, const Grid& grid,
                         const std::string& field);

}  // namespace swp::io
