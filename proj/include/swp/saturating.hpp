#pragma once

// Saturating-hiring model:
//   rho_t + rho_z = -mu rho + P/(1 + alpha P^2) gamma,  rho(t, z_min) = 0.

#include <cmath>
#include <sstream>
#include <type_traits>

#include "swp/errors.hpp"
#include "swp/grid.hpp"
#include "swp/quadrature.hpp"
#include "swp/simulation.hpp"

namespace swp {

namespace detail {
// Intermediate type for the alpha <-> P_eq conversions. One extra rounding
// level is what makes the calibration round trip bit-exact.
template <typename Scalar>
using wider_t = std::conditional_t<std::is_same_v<Scalar, float>, double,
                                   std::conditional_t<std::is_same_v<Scalar, double>, long double, Scalar>>;
}  // namespace detail

template <typename Scalar>
struct SaturatingParams {
  Scalar alpha{};  // pressure constant, 1/employees^2
  AgeProfile<Scalar> mu;
  AgeProfile<Scalar> gamma;  // normalized

  const AgeGrid<Scalar>& grid() const { return mu.grid; }
};

enum class Regime { ExtinctionOnly, Bistable };

inline const char* to_string(Regime r) { return r == Regime::Bistable ? "Bistable" : "ExtinctionOnly"; }

template <typename Scalar>
struct EquilibriumReport {
  Scalar beta{};
  Scalar alpha{};
  Scalar P_eq{};
  AgeProfile<Scalar> rho_eq;
  Regime regime = Regime::ExtinctionOnly;
  bool technical_window = false;  // 1 < beta < 9
};

template <typename Scalar>
void validate(const SaturatingParams<Scalar>& params) {
  require_same_grid(params.mu, params.gamma, "mu/gamma");
  require_nonnegative(params.mu, "mu");
  require_nonnegative(params.gamma, "gamma");
  require_normalized(params.gamma);
  if (!(params.alpha > Scalar(0)) || !std::isfinite(static_cast<double>(params.alpha))) {
    throw Error(ErrorCode::InvalidValue, "alpha must be positive", "alpha");
  }
}

/// beta = double integral of gamma(y) exp(-(M(z) - M(y))) over y <= z.
/// beta > 1 is necessary and sufficient for a positive equilibrium.
template <typename Scalar>
Scalar recruitment_index(const AgeProfile<Scalar>& mu, const AgeProfile<Scalar>& gamma) {
  require_nonnegative(mu, "mu");
  require_nonnegative(gamma, "gamma");
  require_normalized(gamma);
  return integrate(stationary_base(mu, gamma));
}

/// alpha = (beta - 1) / P_eq^2.
template <typename Scalar>
Scalar calibrate_alpha(Scalar beta, Scalar P_eq_target) {
  if (!(beta > Scalar(1))) {
    std::ostringstream msg;
    msg.precision(10);
    msg << "beta = " << beta
        << " <= 1: no positive alpha reaches a nonzero equilibrium (requires beta > 1)";
    throw Error(ErrorCode::InfeasibleCalibration, msg.str(), "saturating.p_eq");
  }
  if (!(P_eq_target > Scalar(0))) {
    throw Error(ErrorCode::InvalidValue, "equilibrium headcount target must be positive", "saturating.p_eq");
  }
  using W = detail::wider_t<Scalar>;
  const W p = static_cast<W>(P_eq_target);
  return static_cast<Scalar>((static_cast<W>(beta) - W(1)) / (p * p));
}

template <typename Scalar>
Scalar equilibrium_headcount(Scalar beta, Scalar alpha) {
  if (!(beta > Scalar(1))) return Scalar(0);
  using W = detail::wider_t<Scalar>;
  using std::sqrt;
  return static_cast<Scalar>(sqrt((static_cast<W>(beta) - W(1)) / static_cast<W>(alpha)));
}

template <typename Scalar>
Scalar saturating_hiring_rate(Scalar P, Scalar alpha) {
  return P / (Scalar(1) + alpha * P * P);
}

template <typename Scalar>
EquilibriumReport<Scalar> equilibria(const SaturatingParams<Scalar>& params) {
  validate(params);
  EquilibriumReport<Scalar> report;
  report.alpha = params.alpha;
  const auto base = stationary_base(params.mu, params.gamma);
  report.beta = integrate(base);
  report.rho_eq = AgeProfile<Scalar>(params.grid());
  if (report.beta > Scalar(1)) {
    report.regime = Regime::Bistable;
    report.P_eq = equilibrium_headcount(report.beta, params.alpha);
    report.rho_eq.values = saturating_hiring_rate(report.P_eq, params.alpha) * base.values;
    report.technical_window = report.beta < Scalar(9);
  }
  return report;
}

/// Semi-implicit upwind step. Requires dt <= dz.
template <typename Scalar>
PopulationState<Scalar> step_saturating(const PopulationState<Scalar>& state,
                                        const SaturatingParams<Scalar>& params, Scalar dt) {
  const auto& g = params.grid();
  if (!(dt > Scalar(0))) throw Error(ErrorCode::InvalidValue, "time step must be positive", "dt");
  const Scalar courant = dt / g.dz;
  if (courant > Scalar(1) + Scalar(1e-12)) {
    std::ostringstream msg;
    msg.precision(10);
    msg << "dt = " << dt << " violates the CFL bound dt <= dz = " << g.dz;
    throw Error(ErrorCode::CflViolation, msg.str(), "dt");
  }
  const Scalar a = saturating_hiring_rate(state.headcount(), params.alpha);
  const auto& rho = state.rho.values;
  PopulationState<Scalar> next{state.t + dt, AgeProfile<Scalar>(g)};
  auto& out = next.rho.values;
  Scalar upstream(0);  // rho(t, z_min) = 0
  for (Eigen::Index j = 1; j <= g.n; ++j) {
    out[j] = (rho[j] - courant * (rho[j] - upstream) + dt * a * params.gamma[j]) /
             (Scalar(1) + params.mu[j] * dt);
    upstream = rho[j];
  }
  return next;
}

template <typename Scalar>
SimulationResult<Scalar> simulate_saturating(const SaturatingParams<Scalar>& params,
                                             const AgeProfile<Scalar>& rho0, Scalar dt, Scalar t_end,
                                             const SimulationOptions& options = {}) {
  validate(params);
  require_same_grid(params.mu, rho0, "mu/rho0");
  require_nonnegative(rho0, "rho0");
  const std::size_t steps = step_count(dt, t_end);

  SimulationResult<Scalar> result;
  result.model = ModelKind::Saturating;
  PopulationState<Scalar> state{Scalar(0), rho0};
  state.rho[0] = Scalar(0);
  const bool extinct = !(state.headcount() > Scalar(0));
  if (extinct) state.rho.values.setZero();

  auto record = [&](const PopulationState<Scalar>& s, std::size_t k) {
    const Scalar P = s.headcount();
    result.times.push_back(s.t);
    result.headcount.push_back(P);
    result.hiring.push_back(saturating_hiring_rate(P, params.alpha));
    const bool keep = k == 0 || k == steps ||
                      (options.snapshot_stride > 0 && k % options.snapshot_stride == 0);
    if (keep) result.snapshots.push_back(s);
  };

  record(state, 0);
  for (std::size_t k = 1; k <= steps; ++k) {
    if (!extinct) state = step_saturating(state, params, dt);
    state.t = static_cast<Scalar>(k) * dt;
    record(state, k);
  }
  return result;
}

}  // namespace swp
