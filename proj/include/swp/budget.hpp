#pragma once

// Budget-conserving model:
//   rho_t + rho_z = -mu rho + h[rho] gamma,  rho(t, z_min) = 0,
// where h keeps the wage bill  integral omega rho dz  constant in time.

#include <algorithm>
#include <cmath>
#include <sstream>

#include "swp/errors.hpp"
#include "swp/grid.hpp"
#include "swp/quadrature.hpp"
#include "swp/simulation.hpp"

namespace swp {

template <typename Scalar>
struct BudgetParams {
  AgeProfile<Scalar> mu;
  AgeProfile<Scalar> gamma;        // normalized
  AgeProfile<Scalar> omega;        // cost per employee, currency/year
  AgeProfile<Scalar> omega_prime;  // forward difference of omega

  const AgeGrid<Scalar>& grid() const { return mu.grid; }
};

template <typename Scalar>
BudgetParams<Scalar> make_budget_params(AgeProfile<Scalar> mu, AgeProfile<Scalar> gamma,
                                        AgeProfile<Scalar> omega) {
  require_same_grid(mu, gamma, "mu/gamma");
  require_same_grid(mu, omega, "mu/omega");
  auto omega_prime = forward_difference(omega);
  return {std::move(mu), std::move(gamma), std::move(omega), std::move(omega_prime)};
}

template <typename Scalar>
void validate(const BudgetParams<Scalar>& params) {
  require_same_grid(params.mu, params.gamma, "mu/gamma");
  require_same_grid(params.mu, params.omega, "mu/omega");
  require_same_grid(params.mu, params.omega_prime, "mu/omega_prime");
  require_nonnegative(params.mu, "mu");
  require_nonnegative(params.gamma, "gamma");
  require_normalized(params.gamma);
  require_nonnegative(params.omega, "omega");
  if (!(params.omega.back() > Scalar(0))) {
    throw Error(ErrorCode::InvalidValue, "cost per employee must be positive at z_max", "omega");
  }
}

template <typename Scalar>
struct BudgetHiring {
  HiringTerms<Scalar> terms;
  Scalar denominator{};  // integral of omega * gamma
  Scalar rate{};         // (attrition + retirement - aging) / denominator
};

/// Hiring rate that holds the wage bill constant. The aging term sums the
/// forward differences over nodes 1..n-1, which is exactly the telescoped
/// upwind flux, so the explicit step conserves dz*sum(omega*rho) to round-off.
template <typename Scalar>
BudgetHiring<Scalar> hiring_rate_budget(const PopulationState<Scalar>& state, const BudgetParams<Scalar>& params) {
  const auto& g = params.grid();
  const auto& rho = state.rho.values;
  BudgetHiring<Scalar> out;
  out.denominator = integrate(g, params.omega.values.cwiseProduct(params.gamma.values));
  if (!(out.denominator > Scalar(0))) {
    throw Error(ErrorCode::Degenerate, "integral of omega*gamma is zero; hiring cannot absorb the budget",
                "gamma");
  }
  out.terms.attrition =
      integrate(g, params.omega.values.cwiseProduct(params.mu.values).cwiseProduct(rho));
  out.terms.retirement = params.omega.back() * rho[g.n];
  out.terms.aging = g.dz * rho.segment(1, g.n - 1).dot(params.omega_prime.values.segment(1, g.n - 1));
  out.rate = (out.terms.attrition + out.terms.retirement - out.terms.aging) / out.denominator;
  return out;
}

struct AssumptionReport {
  bool holds = true;
  Eigen::Index worst_node = 0;
  double margin = 0;  // min over nodes of mu*omega - omega'
};

/// Pointwise check of mu*omega >= omega'.
template <typename Scalar>
AssumptionReport check_budget_assumption(const BudgetParams<Scalar>& params) {
  AssumptionReport report;
  const Vector<Scalar> slack =
      params.mu.values.cwiseProduct(params.omega.values) - params.omega_prime.values;
  Eigen::Index worst = 0;
  const Scalar margin = slack.minCoeff(&worst);
  report.worst_node = worst;
  report.margin = static_cast<double>(margin);
  report.holds = margin >= Scalar(0);
  return report;
}

/// Largest dt with 1 - max(mu) dt - dt/dz >= 0.
template <typename Scalar>
Scalar budget_cfl_bound(const AgeProfile<Scalar>& mu) {
  return mu.grid.dz / (Scalar(1) + mu.grid.dz * mu.values.maxCoeff());
}

/// Default step: 90% of the CFL bound.
template <typename Scalar>
Scalar default_budget_dt(const AgeProfile<Scalar>& mu) {
  return Scalar(0.9) * budget_cfl_bound(mu);
}

template <typename Scalar>
PopulationState<Scalar> step_budget(const PopulationState<Scalar>& state, const BudgetParams<Scalar>& params,
                                    Scalar dt) {
  const auto& g = params.grid();
  if (!(dt > Scalar(0))) throw Error(ErrorCode::InvalidValue, "time step must be positive", "dt");
  const Scalar margin = Scalar(1) - params.mu.values.maxCoeff() * dt - dt / g.dz;
  if (margin < Scalar(-1e-12)) {
    std::ostringstream msg;
    msg.precision(10);
    msg << "dt = " << dt << " violates the CFL condition 1 - max(mu) dt - dt/dz >= 0; admissible dt <= "
        << budget_cfl_bound(params.mu);
    throw Error(ErrorCode::CflViolation, msg.str(), "dt");
  }
  const Scalar h = hiring_rate_budget(state, params).rate;
  const auto& rho = state.rho.values;
  PopulationState<Scalar> next{state.t + dt, AgeProfile<Scalar>(g)};
  auto& out = next.rho.values;
  Scalar upstream(0);
  for (Eigen::Index j = 1; j <= g.n; ++j) {
    out[j] = rho[j] * (Scalar(1) - params.mu[j] * dt) + dt * (h * params.gamma[j] - (rho[j] - upstream) / g.dz);
    upstream = rho[j];
  }
  return next;
}

/// One-parameter family of steady states C * base, C >= 0, and the member
/// m * base reached from a given initial state (same wage bill).
template <typename Scalar>
struct StationaryFamily {
  AgeProfile<Scalar> base;
  Scalar predicted_scale{};  // m

  AgeProfile<Scalar> limit() const { return AgeProfile<Scalar>(base.grid, predicted_scale * base.values); }
};

template <typename Scalar>
StationaryFamily<Scalar> stationary_family(const BudgetParams<Scalar>& params, const AgeProfile<Scalar>& rho0) {
  require_same_grid(params.mu, rho0, "mu/rho0");
  StationaryFamily<Scalar> family{stationary_base(params.mu, params.gamma), Scalar(0)};
  const auto& g = params.grid();
  const Scalar base_budget = integrate(g, family.base.values.cwiseProduct(params.omega.values));
  if (!(base_budget > Scalar(0))) {
    throw Error(ErrorCode::Degenerate, "stationary profile carries no budget (gamma or omega vanish)", "gamma");
  }
  family.predicted_scale = integrate(g, rho0.values.cwiseProduct(params.omega.values)) / base_budget;
  return family;
}

/// Limit of rho/base at z_min: A rho(z_max) + integral B rho, with
/// A = omega(z_max) / integral(omega gamma) and B = (mu omega - omega') / integral(omega gamma).
template <typename Scalar>
Scalar boundary_ratio(const PopulationState<Scalar>& state, const BudgetParams<Scalar>& params) {
  const auto& g = params.grid();
  const Scalar denom = integrate(g, params.omega.values.cwiseProduct(params.gamma.values));
  const Scalar A = params.omega.back() / denom;
  Vector<Scalar> B = params.mu.values.cwiseProduct(params.omega.values);
  B.segment(1, g.n - 1) -= params.omega_prime.values.segment(1, g.n - 1);
  B /= denom;
  return A * state.rho[g.n] + integrate(g, B.cwiseProduct(state.rho.values));
}

/// rho / base at every node; node 0 takes the boundary limit, nodes with an
/// empty stationary profile are reported as 0.
template <typename Scalar>
AgeProfile<Scalar> entropy_ratio(const PopulationState<Scalar>& state, const StationaryFamily<Scalar>& family,
                                 const BudgetParams<Scalar>& params) {
  const auto& g = params.grid();
  AgeProfile<Scalar> u(g);
  u[0] = boundary_ratio(state, params);
  for (Eigen::Index j = 1; j <= g.n; ++j) {
    u[j] = family.base[j] > Scalar(0) ? state.rho[j] / family.base[j] : Scalar(0);
  }
  return u;
}

/// H = integral of omega * base * (rho / base)^2 over nodes where base > 0.
template <typename Scalar>
Scalar relative_entropy(const PopulationState<Scalar>& state, const StationaryFamily<Scalar>& family,
                        const BudgetParams<Scalar>& params) {
  const auto& g = params.grid();
  Scalar acc(0);
  for (Eigen::Index j = 1; j <= g.n; ++j) {
    const Scalar b = family.base[j];
    if (b > Scalar(0)) acc += params.omega[j] * state.rho[j] * state.rho[j] / b;
  }
  return g.dz * acc;
}

template <typename Scalar>
SimulationResult<Scalar> simulate_budget(const BudgetParams<Scalar>& params, const AgeProfile<Scalar>& rho0,
                                         Scalar dt, Scalar t_end, const SimulationOptions& options = {}) {
  validate(params);
  require_same_grid(params.mu, rho0, "mu/rho0");
  require_nonnegative(rho0, "rho0");
  const std::size_t steps = step_count(dt, t_end);

  PopulationState<Scalar> state{Scalar(0), rho0};
  state.rho[0] = Scalar(0);
  const auto family = stationary_family(params, state.rho);
  const auto& g = params.grid();

  SimulationResult<Scalar> result;
  result.model = ModelKind::Budget;
  auto record = [&](const PopulationState<Scalar>& s, std::size_t k) {
    const auto hiring = hiring_rate_budget(s, params);
    result.times.push_back(s.t);
    result.headcount.push_back(s.headcount());
    result.hiring.push_back(hiring.rate);
    result.hiring_terms.push_back(hiring.terms);
    result.budget.push_back(integrate(g, params.omega.values.cwiseProduct(s.rho.values)));
    result.entropy.push_back(relative_entropy(s, family, params));
    const bool keep = k == 0 || k == steps ||
                      (options.snapshot_stride > 0 && k % options.snapshot_stride == 0);
    if (keep) result.snapshots.push_back(s);
  };

  record(state, 0);
  for (std::size_t k = 1; k <= steps; ++k) {
    state = step_budget(state, params, dt);
    state.t = static_cast<Scalar>(k) * dt;
    record(state, k);
  }
  return result;
}

/// Largest relative deviation of the budget series from its initial value.
template <typename Scalar>
Scalar budget_drift(const SimulationResult<Scalar>& result) {
  if (result.budget.empty()) return Scalar(0);
  const Scalar b0 = result.budget.front();
  Scalar worst(0);
  for (Scalar b : result.budget) worst = std::max(worst, std::abs(b - b0));
  return b0 != Scalar(0) ? worst / std::abs(b0) : worst;
}

/// Largest single-step increase of the entropy series, relative to H(0).
template <typename Scalar>
Scalar max_entropy_increase(const SimulationResult<Scalar>& result) {
  if (result.entropy.size() < 2) return Scalar(0);
  Scalar worst(0);
  for (std::size_t k = 1; k < result.entropy.size(); ++k) {
    worst = std::max(worst, result.entropy[k] - result.entropy[k - 1]);
  }
  const Scalar h0 = result.entropy.front();
  return h0 > Scalar(0) ? worst / h0 : worst;
}

/// Entropy slack tolerated per step, relative to H(0).
inline constexpr double kEntropySlack = 1e-8;

}  // namespace swp
