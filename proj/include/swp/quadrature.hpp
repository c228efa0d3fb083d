#pragma once

// Quadrature and survival primitives shared by every model.
//
// All integrals over [z_min, z_max] use the upwind rectangle rule
//   Q[f] = dz * sum_{j=1..n} f_j,
// where node j stands for the cell (z_{j-1}, z_j]. Node 0 is the inflow
// boundary (rho(t, z_min) = 0) and carries no weight. This is the rule under
// which the explicit budget scheme conserves sum_j omega_j rho_j exactly.

#include <Eigen/Core>

#include <cmath>
#include <sstream>

#include "swp/errors.hpp"
#include "swp/grid.hpp"

namespace swp {

template <typename Scalar, typename Derived>
Scalar integrate(const AgeGrid<Scalar>& grid, const Eigen::MatrixBase<Derived>& values) {
  return grid.dz * values.tail(grid.n).sum();
}

template <typename Scalar>
Scalar integrate(const AgeProfile<Scalar>& p) {
  return integrate(p.grid, p.values);
}

/// Tail integrals T_j = dz * sum_{i=max(j,1)..n} f_i, i.e. the integral over [z_j, z_max].
template <typename Scalar, typename Derived>
Vector<Scalar> tail_integrals(const AgeGrid<Scalar>& grid, const Eigen::MatrixBase<Derived>& values) {
  const Eigen::Index n = grid.n;
  Vector<Scalar> tail(n + 1);
  Scalar acc(0);
  for (Eigen::Index j = n; j >= 1; --j) {
    acc += values[j];
    tail[j] = grid.dz * acc;
  }
  tail[0] = tail[1];
  return tail;
}

/// M(z) = integral of mu from z_min, with survival exp(-M).
template <typename Scalar>
struct CumulativeAttrition {
  AgeGrid<Scalar> grid;
  Vector<Scalar> M;
  Vector<Scalar> survival;
};

template <typename Scalar>
CumulativeAttrition<Scalar> cumulative_attrition(const AgeProfile<Scalar>& mu) {
  require_nonnegative(mu, "mu");
  const auto& g = mu.grid;
  Vector<Scalar> M(g.nodes());
  M[0] = Scalar(0);
  for (Eigen::Index j = 1; j <= g.n; ++j) M[j] = M[j - 1] + g.dz * mu[j];
  Vector<Scalar> survival = (-M.array()).exp().matrix();
  return {g, std::move(M), std::move(survival)};
}

/// Rescales a nonnegative profile to unit mass under Q.
template <typename Scalar>
AgeProfile<Scalar> normalize_distribution(const AgeProfile<Scalar>& raw) {
  require_nonnegative(raw, "gamma");
  const Scalar mass = integrate(raw);
  if (!(mass > Scalar(0))) {
    throw Error(ErrorCode::NotNormalizable,
                "hiring profile has no mass above z_min; no hiring profile to normalize", "gamma");
  }
  return AgeProfile<Scalar>(raw.grid, raw.values / mass);
}

/// Relative tolerance for "gamma integrates to one".
inline constexpr double kNormalizationTolerance = 1e-9;

template <typename Scalar>
void require_normalized(const AgeProfile<Scalar>& gamma) {
  const Scalar mass = integrate(gamma);
  if (!(std::abs(static_cast<double>(mass - Scalar(1))) <= kNormalizationTolerance)) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "hiring profile integrates to " << mass << ", expected 1";
    throw Error(ErrorCode::NotNormalizable, msg.str(), "gamma");
  }
}

/// Stationary age structure for a unit hiring rate:
///   base(z) = integral_{z_min}^{z} gamma(y) exp(-(M(z) - M(y))) dy,
/// discretized with the implicit survival factor 1 / (1 + mu_j dz) per cell:
///   base_0 = 0,  base_j = (base_{j-1} + dz * gamma_j) / (1 + mu_j * dz).
/// It is an exact fixed point of both transport schemes for any dt.
template <typename Scalar>
AgeProfile<Scalar> stationary_base(const AgeProfile<Scalar>& mu, const AgeProfile<Scalar>& gamma) {
  require_same_grid(mu, gamma, "mu/gamma");
  const auto& g = mu.grid;
  AgeProfile<Scalar> base(g);
  for (Eigen::Index j = 1; j <= g.n; ++j) {
    base[j] = (base[j - 1] + g.dz * gamma[j]) / (Scalar(1) + mu[j] * g.dz);
  }
  return base;
}

/// Forward difference with a one-sided (backward) difference at z_max.
template <typename Scalar>
AgeProfile<Scalar> forward_difference(const AgeProfile<Scalar>& p) {
  const auto& g = p.grid;
  AgeProfile<Scalar> d(g);
  for (Eigen::Index j = 0; j < g.n; ++j) d[j] = (p[j + 1] - p[j]) / g.dz;
  d[g.n] = (p[g.n] - p[g.n - 1]) / g.dz;
  return d;
}

}  // namespace swp
