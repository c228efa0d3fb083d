#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "swp/grid.hpp"
#include "swp/quadrature.hpp"

namespace swp {

/// Density rho(t, .) in employees per year of age.
template <typename Scalar>
struct PopulationState {
  Scalar t{};
  AgeProfile<Scalar> rho;

  Scalar headcount() const { return integrate(rho); }
};

/// Three-term split of the budget-model hiring rate numerator.
template <typename Scalar>
struct HiringTerms {
  Scalar attrition{};
  Scalar retirement{};
  Scalar aging{};
};

enum class ModelKind { Saturating, Budget };

/// Time series produced by either simulator. Every series is indexed like `times`;
/// `snapshots` hold the profile every `snapshot_stride` steps (plus the final one).
template <typename Scalar>
struct SimulationResult {
  ModelKind model = ModelKind::Saturating;
  std::vector<Scalar> times;
  std::vector<Scalar> headcount;
  std::vector<Scalar> hiring;
  std::vector<HiringTerms<Scalar>> hiring_terms;  // budget model only
  std::vector<Scalar> budget;                     // budget model only
  std::vector<Scalar> entropy;                    // budget model only
  std::vector<PopulationState<Scalar>> snapshots;

  bool empty() const { return times.empty(); }
  std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }
};

struct SimulationOptions {
  std::size_t snapshot_stride = 1;  // 0 keeps only the initial and final profiles
};

/// Number of steps of size dt covering [0, t_end].
template <typename Scalar>
std::size_t step_count(Scalar dt, Scalar t_end) {
  if (!(dt > Scalar(0))) throw Error(ErrorCode::InvalidValue, "time step must be positive", "dt");
  if (!(t_end >= Scalar(0))) throw Error(ErrorCode::InvalidValue, "t_end must be nonnegative", "t_end");
  const double ratio = static_cast<double>(t_end / dt);
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) return static_cast<std::size_t>(nearest);
  return static_cast<std::size_t>(std::ceil(ratio));
}

/// Default relative L1 tolerance of the steady-state detector.
inline constexpr double kSteadyStateTolerance = 1e-3;

/// Relative L1 distance of every snapshot to the final one, normalized by
/// max(|rho_final|_1, |rho_initial|_1) so that extinction is measured against
/// the starting headcount.
template <typename Scalar>
std::vector<Scalar> distance_to_final(const SimulationResult<Scalar>& result) {
  std::vector<Scalar> out;
  if (result.snapshots.empty()) return out;
  const auto& last = result.snapshots.back().rho;
  const auto& first = result.snapshots.front().rho;
  const Scalar scale = std::max(integrate(last.grid, last.values.cwiseAbs()),
                                integrate(first.grid, first.values.cwiseAbs()));
  out.reserve(result.snapshots.size());
  for (const auto& s : result.snapshots) {
    const Scalar dist = integrate(last.grid, (s.rho.values - last.values).cwiseAbs());
    out.push_back(scale > Scalar(0) ? dist / scale : Scalar(0));
  }
  return out;
}

/// First snapshot time after which the profile stays within `tol` of the final
/// profile. Empty when only the final sample qualifies.
template <typename Scalar>
std::optional<Scalar> detect_steady_state(const SimulationResult<Scalar>& result,
                                          Scalar tol = Scalar(kSteadyStateTolerance)) {
  const auto dist = distance_to_final(result);
  if (dist.empty()) return std::nullopt;
  std::size_t first = dist.size() - 1;
  while (first > 0 && dist[first - 1] <= tol) --first;
  if (first == dist.size() - 1 && dist.size() > 1) return std::nullopt;
  return result.snapshots[first].t;
}

}  // namespace swp
