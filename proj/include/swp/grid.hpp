#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <sstream>
#include <utility>

#include "swp/errors.hpp"

namespace swp {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Uniform discretization of the age interval [z_min, z_max]: nodes z_j = z_min + j*dz, j = 0..n.
template <typename Scalar>
struct AgeGrid {
  Scalar z_min{};
  Scalar z_max{};
  Scalar dz{};
  Eigen::Index n = 0;  // cell count; the grid carries n + 1 nodes

  Eigen::Index nodes() const { return n + 1; }
  Scalar age(Eigen::Index j) const { return z_min + static_cast<Scalar>(j) * dz; }

  Vector<Scalar> ages() const {
    Vector<Scalar> z(nodes());
    for (Eigen::Index j = 0; j < nodes(); ++j) z[j] = age(j);
    return z;
  }

  /// Node index whose age is within dz/2 of `z`, or -1 outside the grid.
  Eigen::Index index_of(Scalar z) const {
    const Scalar s = (z - z_min) / dz;
    const auto j = static_cast<Eigen::Index>(std::llround(static_cast<double>(s)));
    if (j < 0 || j > n || std::abs(static_cast<double>(s - static_cast<Scalar>(j))) > 1e-6) return -1;
    return j;
  }

  friend bool operator==(const AgeGrid& a, const AgeGrid& b) {
    return a.z_min == b.z_min && a.z_max == b.z_max && a.dz == b.dz && a.n == b.n;
  }
};

/// Divisibility tolerance for the age interval, in years.
inline constexpr double kGridTolerance = 1e-9;

template <typename Scalar>
AgeGrid<Scalar> build_grid(Scalar z_min, Scalar z_max, Scalar dz) {
  using std::isfinite;
  if (!isfinite(z_min) || !isfinite(z_max) || !isfinite(dz)) {
    throw Error(ErrorCode::Configuration, "grid bounds and step must be finite", "grid");
  }
  if (!(z_min < z_max)) {
    std::ostringstream msg;
    msg << "z_min (" << z_min << ") must be below z_max (" << z_max << ")";
    throw Error(ErrorCode::Configuration, msg.str(), "grid");
  }
  if (!(dz > Scalar(0))) {
    throw Error(ErrorCode::Configuration, "dz must be positive", "grid.dz");
  }
  const Scalar length = z_max - z_min;
  const auto n = static_cast<Eigen::Index>(std::llround(static_cast<double>(length / dz)));
  const Scalar residual = static_cast<Scalar>(n) * dz - length;
  if (n < 1 || std::abs(static_cast<double>(residual)) > kGridTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "dz = " << dz << " does not divide [" << z_min << ", " << z_max
        << "]: residual " << residual << " years";
    throw Error(ErrorCode::Configuration, msg.str(), "grid.dz");
  }
  return AgeGrid<Scalar>{z_min, z_max, dz, n};
}

/// A function of age tabulated at every grid node.
template <typename Scalar>
struct AgeProfile {
  AgeGrid<Scalar> grid;
  Vector<Scalar> values;

  AgeProfile() = default;

  explicit AgeProfile(const AgeGrid<Scalar>& g) : grid(g), values(Vector<Scalar>::Zero(g.nodes())) {}

  AgeProfile(const AgeGrid<Scalar>& g, Vector<Scalar> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.nodes()) {
      std::ostringstream msg;
      msg << "profile has " << values.size() << " values, grid has " << grid.nodes() << " nodes";
      throw Error(ErrorCode::Configuration, msg.str());
    }
  }

  static AgeProfile constant(const AgeGrid<Scalar>& g, Scalar value) {
    return AgeProfile(g, Vector<Scalar>::Constant(g.nodes(), value));
  }

  /// Tabulates `fn(z)` at every node.
  template <typename Fn>
  static AgeProfile from_function(const AgeGrid<Scalar>& g, Fn&& fn) {
    Vector<Scalar> v(g.nodes());
    for (Eigen::Index j = 0; j < g.nodes(); ++j) v[j] = fn(g.age(j));
    return AgeProfile(g, std::move(v));
  }

  Eigen::Index size() const { return values.size(); }
  Scalar operator[](Eigen::Index j) const { return values[j]; }
  Scalar& operator[](Eigen::Index j) { return values[j]; }
  Scalar front() const { return values[0]; }
  Scalar back() const { return values[values.size() - 1]; }
};

template <typename Scalar>
void require_same_grid(const AgeProfile<Scalar>& a, const AgeProfile<Scalar>& b, const char* what) {
  if (!(a.grid == b.grid) || a.size() != b.size()) {
    throw Error(ErrorCode::Configuration, std::string("profiles are on different grids: ") + what);
  }
}

template <typename Scalar>
void require_nonnegative(const AgeProfile<Scalar>& p, const char* name) {
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    if (!(p[j] >= Scalar(0)) || !std::isfinite(static_cast<double>(p[j]))) {
      std::ostringstream msg;
      msg << "negative or non-finite value " << p[j] << " at age " << p.grid.age(j);
      throw Error(ErrorCode::InvalidValue, msg.str(), name);
    }
  }
}

}  // namespace swp
