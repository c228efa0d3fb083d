#pragma once

// Cost-minimal stationary workforce under a total-knowledge constraint
//   minimize  integral w rho   subject to  integral z rho = E,
// over stationary structures rho = exp(-M) * (nondecreasing hiring record).
// The optimum hires everyone at the age z0 minimizing d = f/g.

#include <cmath>
#include <sstream>
#include <string>

#include "swp/errors.hpp"
#include "swp/grid.hpp"
#include "swp/quadrature.hpp"
#include "swp/simulation.hpp"

namespace swp {

template <typename Scalar>
struct OptimizerCurves {
  AgeProfile<Scalar> f;         // tail cost  integral_z^zmax w exp(-M)
  AgeProfile<Scalar> g;         // tail knowledge  integral_z^zmax y exp(-M)
  AgeProfile<Scalar> d;         // f / g, with d(z_max) = w(z_max) / z_max
  AgeProfile<Scalar> survival;  // exp(-M)
};

enum class PolicyCase { InternalCareers, ExpertPool, YouthIntake };

inline const char* to_string(PolicyCase c) {
  switch (c) {
    case PolicyCase::InternalCareers: return "InternalCareers";
    case PolicyCase::ExpertPool: return "ExpertPool";
    case PolicyCase::YouthIntake: return "YouthIntake";
  }
  return "unknown";
}

/// Hiring concentrated at a single age.
template <typename Scalar>
struct HiringMass {
  Scalar age{};
  Scalar magnitude{};  // b * exp(-M(z0)), employees per year
};

template <typename Scalar>
struct OptimalPolicy {
  Scalar z0{};
  Eigen::Index z0_index = 0;
  Scalar b{};
  AgeProfile<Scalar> rho_star;
  HiringMass<Scalar> hiring;
  Scalar C{};
  Scalar E{};
  Scalar headcount{};
  PolicyCase policy_case = PolicyCase::InternalCareers;
  bool degenerate_support = false;  // z0 = z_max: the whole workforce sits in the last cell
};

template <typename Scalar>
OptimizerCurves<Scalar> optimizer_curves(const AgeProfile<Scalar>& w, const AgeProfile<Scalar>& mu) {
  require_same_grid(w, mu, "w/mu");
  require_nonnegative(w, "omega");
  const auto& grid = w.grid;
  const auto attrition = cumulative_attrition(mu);
  const Vector<Scalar> z = grid.ages();

  OptimizerCurves<Scalar> curves;
  curves.survival = AgeProfile<Scalar>(grid, attrition.survival);
  curves.f = AgeProfile<Scalar>(grid, tail_integrals(grid, w.values.cwiseProduct(attrition.survival)));
  curves.g = AgeProfile<Scalar>(grid, tail_integrals(grid, z.cwiseProduct(attrition.survival)));
  curves.d = AgeProfile<Scalar>(grid);
  for (Eigen::Index j = 0; j < grid.n; ++j) {
    if (!(curves.g[j] > Scalar(0))) {
      throw Error(ErrorCode::InvalidValue, "tail knowledge vanishes below z_max (ages must be positive)", "grid");
    }
    curves.d[j] = curves.f[j] / curves.g[j];
  }
  curves.d[grid.n] = w.back() / grid.z_max;
  return curves;
}

/// Relative tolerance under which two values of d count as a tie.
inline constexpr double kTieTolerance = 1e-12;

/// Grid argmin of d; ties go to the smallest age.
template <typename Scalar>
Eigen::Index optimal_hiring_index(const OptimizerCurves<Scalar>& curves) {
  const auto& d = curves.d.values;
  const Scalar best = d.minCoeff();
  const Scalar slack = Scalar(kTieTolerance) * std::abs(best);
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    if (d[j] <= best + slack) return j;
  }
  return d.size() - 1;
}

template <typename Scalar>
Scalar optimal_hiring_age(const OptimizerCurves<Scalar>& curves) {
  return curves.d.grid.age(optimal_hiring_index(curves));
}

template <typename Scalar>
OptimalPolicy<Scalar> optimal_structure(const OptimizerCurves<Scalar>& curves, Scalar z0, Scalar E) {
  const auto& grid = curves.d.grid;
  if (!(E > Scalar(0))) throw Error(ErrorCode::InvalidValue, "knowledge target E must be positive", "optimize.E");
  const Eigen::Index j0 = grid.index_of(z0);
  if (j0 < 0) {
    std::ostringstream msg;
    msg << "hiring age " << z0 << " is not a grid node";
    throw Error(ErrorCode::InvalidValue, msg.str(), "z0");
  }

  OptimalPolicy<Scalar> policy;
  policy.z0 = grid.age(j0);
  policy.z0_index = j0;
  policy.E = E;
  policy.b = E / curves.g[j0];
  policy.rho_star = AgeProfile<Scalar>(grid);
  for (Eigen::Index j = j0; j <= grid.n; ++j) policy.rho_star[j] = policy.b * curves.survival[j];
  policy.hiring = {policy.z0, policy.b * curves.survival[j0]};
  policy.C = E * curves.d[j0];
  policy.headcount = integrate(policy.rho_star);
  if (j0 == 0) {
    policy.policy_case = PolicyCase::YouthIntake;
  } else if (j0 == grid.n) {
    policy.policy_case = PolicyCase::ExpertPool;
    policy.degenerate_support = true;
  } else {
    policy.policy_case = PolicyCase::InternalCareers;
  }
  return policy;
}

template <typename Scalar>
OptimalPolicy<Scalar> optimize_policy(const AgeProfile<Scalar>& w, const AgeProfile<Scalar>& mu, Scalar E) {
  const auto curves = optimizer_curves(w, mu);
  return optimal_structure(curves, optimal_hiring_age(curves), E);
}

template <typename Scalar>
struct PolicySavings {
  Scalar current_cost{};
  Scalar optimal_cost{};
  Scalar saving_fraction{};
};

template <typename Scalar>
PolicySavings<Scalar> policy_savings(const PopulationState<Scalar>& current, const AgeProfile<Scalar>& w,
                                     const OptimalPolicy<Scalar>& policy) {
  require_same_grid(current.rho, w, "current/w");
  require_same_grid(current.rho, policy.rho_star, "current/rho_star");
  PolicySavings<Scalar> out;
  out.current_cost = integrate(w.grid, w.values.cwiseProduct(current.rho.values));
  if (!(out.current_cost > Scalar(0))) {
    throw Error(ErrorCode::Degenerate, "current structure has zero cost; saving is undefined", "rho0");
  }
  out.optimal_cost = policy.C;
  out.saving_fraction = Scalar(1) - policy.C / out.current_cost;
  return out;
}

}  // namespace swp
