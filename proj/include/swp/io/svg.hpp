#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "swp/optimizer.hpp"
#include "swp/saturating.hpp"
#include "swp/simulation.hpp"

namespace swp::io {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<Series> series;
  std::optional<double> marker_x;  // vertical marker (e.g. optimal hiring age)
  std::string marker_label;
};

/// Fixed 640x400 viewport with a 70/20/40/50 (left/right/top/bottom) plot margin.
struct Viewport {
  double width = 640;
  double height = 400;
  double left = 70;
  double right = 20;
  double top = 40;
  double bottom = 50;
};

/// Data bounds after padding a degenerate range.
struct Bounds {
  double x_min, x_max, y_min, y_max;
};

Bounds plot_bounds(const Plot& plot);
double to_pixel_x(double x, const Bounds& b, const Viewport& vp = {});
double to_pixel_y(double y, const Bounds& b, const Viewport& vp = {});

std::string render_svg(const Plot& plot, const Viewport& vp = {});
void write_svg(const std::filesystem::path& path, const Plot& plot);

/// age_structure.svg (initial and final profiles) and headcount.svg.
std::vector<std::filesystem::path> render_simulation_plots(const SimulationResult<double>& result,
                                                           const std::filesystem::path& dir);

/// rho_eq.svg
std::filesystem::path render_equilibrium_plot(const EquilibriumReport<double>& report,
                                              const std::filesystem::path& dir);

/// d.svg (argmin marked), omega.svg and rho_star.svg.
std::vector<std::filesystem::path> render_policy_plots(const OptimizerCurves<double>& curves,
                                                       const OptimalPolicy<double>& policy,
                                                       const AgeProfile<double>& omega,
                                                       const std::filesystem::path& dir);

}  // namespace swp::io
