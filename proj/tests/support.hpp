#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "swp/swp.hpp"

namespace swp::test {

using Grid = AgeGrid<double>;
using Profile = AgeProfile<double>;

inline Grid working_age_grid(double dz = 1.0) { return build_grid(20.0, 70.0, dz); }

inline Profile constant(const Grid& g, double v) { return Profile::constant(g, v); }

/// Unit-mass hiring profile carried by the first cell above z_min.
inline Profile first_cell_hiring(const Grid& g) {
  Profile p(g);
  p[1] = 1.0 / g.dz;
  return p;
}

inline Profile gaussian(const Grid& g, double mean, double sd, double mass = 1.0) {
  Profile p = Profile::from_function(g, [&](double z) { return std::exp(-0.5 * (z - mean) * (z - mean) / (sd * sd)); });
  p.values *= mass / integrate(p);
  return p;
}

inline double sup_norm(const Profile& p) { return p.values.cwiseAbs().maxCoeff(); }

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("swp_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace swp::test
