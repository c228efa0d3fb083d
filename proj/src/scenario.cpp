#include "swp/io/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "swp/io/csv.hpp"
#include "swp/quadrature.hpp"

namespace swp::io {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// A raw mass this close to 1 is left untouched, so that writing a normalized
// profile and loading it again reproduces it bit for bit.
constexpr double kMassTolerance = 1e-12;

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw Error(ErrorCode::Configuration, "unknown key '" + key + "'", join(where, key));
  }
}

const json& require_object(const json& parent, const std::string& key, const std::string& where) {
  if (!parent.contains(key)) throw Error(ErrorCode::MissingField, "required field is missing", join(where, key));
  const json& v = parent.at(key);
  if (!v.is_object()) throw Error(ErrorCode::Configuration, "expected an object", join(where, key));
  return v;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw Error(ErrorCode::InvalidValue, "expected a number", path);
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw Error(ErrorCode::InvalidValue, "expected a finite number", path);
  return x;
}

double require_number(const json& parent, const std::string& key, const std::string& where) {
  if (!parent.contains(key)) throw Error(ErrorCode::MissingField, "required field is missing", join(where, key));
  return as_number(parent.at(key), join(where, key));
}

std::optional<double> optional_number(const json& parent, const std::string& key, const std::string& where) {
  if (!parent.contains(key) || parent.at(key).is_null()) return std::nullopt;
  return as_number(parent.at(key), join(where, key));
}

double require_positive(double x, const std::string& path) {
  if (!(x > 0)) {
    std::ostringstream msg;
    msg << "must be positive (got " << x << ")";
    throw Error(ErrorCode::InvalidValue, msg.str(), path);
  }
  return x;
}

ScenarioModel parse_model(const json& v) {
  if (!v.is_string()) throw Error(ErrorCode::Configuration, "expected a string", "model");
  const auto s = v.get<std::string>();
  if (s == "saturating") return ScenarioModel::Saturating;
  if (s == "budget") return ScenarioModel::Budget;
  if (s == "optimize") return ScenarioModel::Optimize;
  throw Error(ErrorCode::Configuration, "unknown model '" + s + "' (saturating, budget, optimize)", "model");
}

void check_nonnegative(const Profile& p, const std::string& field) {
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    if (!std::isfinite(p[j])) throw Error(ErrorCode::InvalidValue, "non-finite value at z = " + format_number(p.grid.age(j)), field);
    if (p[j] < 0) {
      throw Error(ErrorCode::InvalidValue,
                  "negative value " + format_number(p[j]) + " at z = " + format_number(p.grid.age(j)), field);
    }
  }
}

Profile polynomial(const json& coeffs, const Grid& grid, const std::string& field) {
  if (!coeffs.is_array() || coeffs.empty()) {
    throw Error(ErrorCode::Configuration, "expected a nonempty coefficient list", field + ".polynomial");
  }
  std::vector<double> c;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    c.push_back(as_number(coeffs[i], field + ".polynomial[" + std::to_string(i) + "]"));
  }
  return Profile::from_function(grid, [&](double z) {
    double acc = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
  });
}

std::vector<std::pair<double, double>> piecewise_points(const json& nodes, const std::string& field) {
  if (!nodes.is_array() || nodes.empty()) {
    throw Error(ErrorCode::Configuration, "expected a nonempty list of [z, value] pairs", field);
  }
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = field + "[" + std::to_string(i) + "]";
    const json& node = nodes[i];
    if (!node.is_array() || node.size() != 2) throw Error(ErrorCode::Configuration, "expected [z, value]", where);
    pts.emplace_back(as_number(node[0], where), as_number(node[1], where));
  }
  return pts;
}

const std::set<std::string> kProfileKeys = {"constant", "linear",    "polynomial", "piecewise", "csv",
                                            "gaussian", "exponential", "sum",      "scale",     "headcount"};

std::pair<double, double> number_pair(const json& v, const std::string& field, const char* shape) {
  if (!v.is_array() || v.size() != 2) throw Error(ErrorCode::Configuration, std::string("expected ") + shape, field);
  return {as_number(v[0], field + "[0]"), as_number(v[1], field + "[1]")};
}

}  // namespace

const char* to_string(ScenarioModel m) {
  switch (m) {
    case ScenarioModel::Saturating: return "saturating";
    case ScenarioModel::Budget: return "budget";
    case ScenarioModel::Optimize: return "optimize";
  }
  return "unknown";
}

std::vector<std::pair<double, double>> read_profile_csv(const fs::path& path) {
  const CsvData data = read_csv(path);
  if (data.header.size() != 2) {
    throw Error(ErrorCode::Configuration, "profile file must have exactly two columns (z,value)", path.string());
  }
  std::vector<std::pair<double, double>> pts;
  pts.reserve(data.rows.size());
  for (const auto& row : data.rows) pts.emplace_back(row[0], row[1]);
  if (pts.empty()) throw Error(ErrorCode::Configuration, "profile file has no data rows", path.string());
  return pts;
}

Profile interpolate_onto(const std::vector<std::pair<double, double>>& points, const Grid& grid,
                         const std::string& field) {
  if (points.empty()) throw Error(ErrorCode::Configuration, "no profile points", field);
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].first > points[i - 1].first)) {
      throw Error(ErrorCode::Configuration, "ages must be strictly increasing", field);
    }
  }
  const double slack = kGridTolerance * std::max(1.0, std::abs(grid.z_max));
  if (points.front().first > grid.z_min + slack || points.back().first < grid.z_max - slack) {
    std::ostringstream msg;
    msg << "profile covers [" << points.front().first << ", " << points.back().first << "] but the grid spans ["
        << grid.z_min << ", " << grid.z_max << "]";
    throw Error(ErrorCode::InvalidValue, msg.str(), field);
  }
  Profile out(grid);
  std::size_t k = 0;
  for (Eigen::Index j = 0; j <= grid.n; ++j) {
    const double z = grid.age(j);
    while (k + 1 < points.size() && points[k + 1].first <= z) ++k;
    const auto& [z0, v0] = points[k];
    if (z <= z0 || k + 1 == points.size()) {
      out.values[j] = v0;  // exact hit, or end point within the coverage slack
      continue;
    }
    const auto& [z1, v1] = points[k + 1];
    const double s = (z - z0) / (z1 - z0);
    out.values[j] = v0 + s * (v1 - v0);
  }
  return out;
}

Profile resolve_profile(const json& spec, const Grid& grid, const fs::path& base_dir, const std::string& field) {
  if (spec.is_number()) return Profile::constant(grid, as_number(spec, field));
  if (!spec.is_object()) {
    throw Error(ErrorCode::Configuration, "expected a number or a profile object", field);
  }
  reject_unknown_keys(spec, kProfileKeys, field);

  int forms = 0;
  for (const char* key : {"constant", "linear", "polynomial", "piecewise", "csv", "gaussian", "exponential", "sum"}) {
    forms += spec.contains(key);
  }
  if (forms != 1) {
    throw Error(ErrorCode::Configuration,
                "exactly one of constant, linear, polynomial, piecewise, csv, gaussian, exponential, sum is required",
                field);
  }

  Profile p(grid);
  if (spec.contains("constant")) {
    p = Profile::constant(grid, as_number(spec.at("constant"), field + ".constant"));
  } else if (spec.contains("linear")) {
    const json& ab = spec.at("linear");
    if (!ab.is_array() || ab.size() != 2) throw Error(ErrorCode::Configuration, "expected [a, b]", field + ".linear");
    p = polynomial(ab, grid, field + ".linear");
  } else if (spec.contains("polynomial")) {
    p = polynomial(spec.at("polynomial"), grid, field);
  } else if (spec.contains("piecewise")) {
    p = interpolate_onto(piecewise_points(spec.at("piecewise"), field + ".piecewise"), grid, field + ".piecewise");
  } else if (spec.contains("gaussian")) {
    const auto [mean, sd] = number_pair(spec.at("gaussian"), field + ".gaussian", "[mean, sd]");
    require_positive(sd, field + ".gaussian[1]");
    p = Profile::from_function(grid, [&](double z) { return std::exp(-0.5 * (z - mean) * (z - mean) / (sd * sd)); });
  } else if (spec.contains("exponential")) {
    const auto [z_ref, length] = number_pair(spec.at("exponential"), field + ".exponential", "[z_ref, length]");
    if (length == 0) throw Error(ErrorCode::InvalidValue, "length must be nonzero", field + ".exponential[1]");
    p = Profile::from_function(grid, [&](double z) { return std::exp((z - z_ref) / length); });
  } else if (spec.contains("sum")) {
    const json& terms = spec.at("sum");
    if (!terms.is_array() || terms.empty()) {
      throw Error(ErrorCode::Configuration, "expected a nonempty list of profiles", field + ".sum");
    }
    for (std::size_t i = 0; i < terms.size(); ++i) {
      p.values += resolve_profile(terms[i], grid, base_dir, field + ".sum[" + std::to_string(i) + "]").values;
    }
  } else {
    const json& file = spec.at("csv");
    if (!file.is_string()) throw Error(ErrorCode::Configuration, "expected a file path", field + ".csv");
    fs::path path = file.get<std::string>();
    if (path.is_relative()) path = base_dir / path;
    if (!fs::exists(path)) throw Error(ErrorCode::Io, "profile file not found: " + path.string(), field + ".csv");
    p = interpolate_onto(read_profile_csv(path), grid, field + ".csv (" + path.string() + ")");
  }

  if (auto scale = optional_number(spec, "scale", field)) p.values *= *scale;
  if (auto target = optional_number(spec, "headcount", field)) {
    if (*target < 0) throw Error(ErrorCode::InvalidValue, "headcount must be nonnegative", field + ".headcount");
    const double mass = integrate(p);
    if (!(mass > 0)) {
      throw Error(ErrorCode::NotNormalizable, "cannot rescale a profile with zero mass", field + ".headcount");
    }
    p.values *= *target / mass;
  }
  return p;
}

SaturatingParams<double> Scenario::saturating_params() const {
  if (!mu || !gamma) throw Error(ErrorCode::MissingField, "mu and gamma are required", "profiles");
  return {alpha, *mu, *gamma};
}

BudgetParams<double> Scenario::budget_params() const {
  if (!mu || !gamma) throw Error(ErrorCode::MissingField, "mu and gamma are required", "profiles");
  if (!omega) throw Error(ErrorCode::MissingField, "required for the budget model", "profiles.omega");
  return make_budget_params(*mu, *gamma, *omega);
}

const Profile& Scenario::initial_state() const {
  if (!rho0) throw Error(ErrorCode::MissingField, "an initial density is required", "profiles.rho0");
  return *rho0;
}

double max_time_step(const Scenario& s) {
  if (s.model == ScenarioModel::Budget && s.mu) return budget_cfl_bound(*s.mu);
  return s.grid.dz;
}

double cfl_margin(const Scenario& s) {
  const double courant = s.dt / s.grid.dz;
  if (s.model == ScenarioModel::Budget && s.mu) return 1.0 - s.mu->values.maxCoeff() * s.dt - courant;
  return 1.0 - courant;
}

void check_time_step(const Scenario& s) {
  if (s.model == ScenarioModel::Optimize) return;
  if (!(s.dt > 0)) throw Error(ErrorCode::InvalidValue, "time step must be positive", "time.dt");
  if (!(s.t_end >= 0)) throw Error(ErrorCode::InvalidValue, "must be nonnegative", "time.t_end");
  if (cfl_margin(s) < -1e-12) {
    std::ostringstream msg;
    msg.precision(10);
    if (s.model == ScenarioModel::Budget) {
      msg << "dt = " << s.dt << " violates 1 - max(mu) dt - dt/dz >= 0; use dt <= " << max_time_step(s);
    } else {
      msg << "dt = " << s.dt << " violates dt <= dz; use dt <= " << max_time_step(s);
    }
    throw Error(ErrorCode::CflViolation, msg.str(), "time.dt");
  }
}

Scenario parse_scenario(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw Error(ErrorCode::Configuration, "scenario must be a JSON object", "");
  reject_unknown_keys(doc, {"name", "model", "grid", "time", "saturating", "optimize", "profiles"}, "");

  Scenario s;
  s.base_dir = base_dir;
  if (doc.contains("name")) {
    if (!doc.at("name").is_string()) throw Error(ErrorCode::Configuration, "expected a string", "name");
    s.name = doc.at("name").get<std::string>();
  } else {
    s.name = "scenario";
  }
  if (!doc.contains("model")) throw Error(ErrorCode::MissingField, "required field is missing", "model");
  s.model = parse_model(doc.at("model"));

  const json& grid = require_object(doc, "grid", "");
  reject_unknown_keys(grid, {"z_min", "z_max", "dz"}, "grid");
  s.grid = build_grid(require_number(grid, "z_min", "grid"), require_number(grid, "z_max", "grid"),
                      require_number(grid, "dz", "grid"));

  const json& profiles = require_object(doc, "profiles", "");
  reject_unknown_keys(profiles, {"mu", "gamma", "omega", "rho0"}, "profiles");
  auto load = [&](const char* key, bool required) -> std::optional<Profile> {
    const std::string path = std::string("profiles.") + key;
    if (!profiles.contains(key)) {
      if (required) throw Error(ErrorCode::MissingField, "required for the " + std::string(to_string(s.model)) + " model", path);
      return std::nullopt;
    }
    Profile p = resolve_profile(profiles.at(key), s.grid, base_dir, path);
    check_nonnegative(p, path);
    return p;
  };

  const bool needs_gamma = s.model != ScenarioModel::Optimize;
  s.mu = load("mu", true);
  s.gamma = load("gamma", needs_gamma);
  s.omega = load("omega", s.model != ScenarioModel::Saturating);
  s.rho0 = load("rho0", s.model == ScenarioModel::Budget);

  if (s.gamma) {
    const double mass = integrate(*s.gamma);
    if (!(mass > 0)) throw Error(ErrorCode::NotNormalizable, "hiring profile has zero mass", "profiles.gamma");
    if (std::abs(mass - 1.0) > kMassTolerance) {
      s.gamma = normalize_distribution(*s.gamma);
      std::ostringstream note;
      note << "profiles.gamma: normalized to unit mass (raw mass " << std::setprecision(10) << mass << ")";
      s.notices.push_back(note.str());
    }
  }

  if (s.model == ScenarioModel::Saturating) {
    const json& block = require_object(doc, "saturating", "");
    reject_unknown_keys(block, {"alpha", "p_eq"}, "saturating");
    const auto alpha = optional_number(block, "alpha", "saturating");
    const auto p_eq = optional_number(block, "p_eq", "saturating");
    if (alpha.has_value() == p_eq.has_value()) {
      throw Error(ErrorCode::Configuration, "exactly one of alpha and p_eq is required", "saturating");
    }
    s.beta = recruitment_index(*s.mu, *s.gamma);
    if (alpha) {
      s.calibration = Calibration::Alpha;
      s.alpha = require_positive(*alpha, "saturating.alpha");
    } else {
      s.calibration = Calibration::EquilibriumTarget;
      s.p_eq = require_positive(*p_eq, "saturating.p_eq");
      s.alpha = calibrate_alpha(s.beta, s.p_eq);
    }
  } else if (doc.contains("saturating")) {
    throw Error(ErrorCode::Configuration, "only valid for the saturating model", "saturating");
  }

  if (s.model == ScenarioModel::Budget) {
    const auto params = s.budget_params();
    validate(params);
    s.beta = recruitment_index(*s.mu, *s.gamma);
  }

  if (s.model == ScenarioModel::Optimize) {
    const json& block = require_object(doc, "optimize", "");
    reject_unknown_keys(block, {"E"}, "optimize");
    s.knowledge = require_positive(require_number(block, "E", "optimize"), "optimize.E");
    if (!(s.grid.z_min > 0)) throw Error(ErrorCode::InvalidValue, "ages must be positive for the optimizer", "grid.z_min");
  } else if (doc.contains("optimize")) {
    throw Error(ErrorCode::Configuration, "only valid for the optimize model", "optimize");
  }

  if (s.model != ScenarioModel::Optimize) {
    const json& time = require_object(doc, "time", "");
    reject_unknown_keys(time, {"dt", "t_end", "snapshot_every"}, "time");
    s.t_end = require_number(time, "t_end", "time");
    if (s.t_end < 0) throw Error(ErrorCode::InvalidValue, "must be nonnegative", "time.t_end");
    if (auto dt = optional_number(time, "dt", "time")) {
      s.dt = require_positive(*dt, "time.dt");
    } else if (s.model == ScenarioModel::Budget) {
      s.dt = default_budget_dt(*s.mu);
      s.dt_defaulted = true;
    } else {
      throw Error(ErrorCode::MissingField, "required for the saturating model", "time.dt");
    }
    if (auto every = optional_number(time, "snapshot_every", "time")) {
      if (*every < 0) throw Error(ErrorCode::InvalidValue, "must be nonnegative", "time.snapshot_every");
      s.snapshot_every = *every;
    }
    check_time_step(s);
  } else if (doc.contains("time")) {
    throw Error(ErrorCode::Configuration, "not used by the optimize model", "time");
  }
  return s;
}

Scenario load_scenario(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open scenario file", path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Configuration, std::string("malformed JSON: ") + e.what(), path.string());
  }
  return parse_scenario(doc, path.parent_path());
}

namespace {

json inline_profile(const Profile& p) {
  json nodes = json::array();
  for (Eigen::Index j = 0; j < p.size(); ++j) nodes.push_back({p.grid.age(j), p[j]});
  return json{{"piecewise", std::move(nodes)}};
}

}  // namespace

json scenario_to_json(const Scenario& s) {
  json doc;
  doc["name"] = s.name;
  doc["model"] = to_string(s.model);
  doc["grid"] = {{"z_min", s.grid.z_min}, {"z_max", s.grid.z_max}, {"dz", s.grid.dz}};
  if (s.model != ScenarioModel::Optimize) {
    json time = {{"t_end", s.t_end}, {"snapshot_every", s.snapshot_every}};
    if (!s.dt_defaulted) time["dt"] = s.dt;
    doc["time"] = std::move(time);
  }
  if (s.model == ScenarioModel::Saturating) {
    doc["saturating"] = s.calibration == Calibration::EquilibriumTarget ? json{{"p_eq", s.p_eq}}
                                                                         : json{{"alpha", s.alpha}};
  }
  if (s.model == ScenarioModel::Optimize && s.knowledge) doc["optimize"] = {{"E", *s.knowledge}};
  json profiles = json::object();
  if (s.mu) profiles["mu"] = inline_profile(*s.mu);
  if (s.gamma) profiles["gamma"] = inline_profile(*s.gamma);
  if (s.omega) profiles["omega"] = inline_profile(*s.omega);
  if (s.rho0) profiles["rho0"] = inline_profile(*s.rho0);
  doc["profiles"] = std::move(profiles);
  return doc;
}

void write_scenario(const Scenario& s, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write scenario file", path.string());
  out << scenario_to_json(s).dump(2) << '\n';
  if (!out) throw Error(ErrorCode::Io, "write failed", path.string());
}

}  // namespace swp::io
