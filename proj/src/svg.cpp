#include "swp/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "swp/errors.hpp"

namespace swp::io {

namespace fs = std::filesystem;

namespace {

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void pad(double& lo, double& hi) {
  if (hi > lo) return;
  const double half = lo != 0 ? 0.05 * std::abs(lo) : 1.0;
  lo -= half;
  hi += half;
}

Series profile_series(const AgeProfile<double>& p, std::string label, std::string color) {
  Series s{std::move(label), {}, {}, std::move(color)};
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    s.x.push_back(p.grid.age(j));
    s.y.push_back(p[j]);
  }
  return s;
}

}  // namespace

Bounds plot_bounds(const Plot& plot) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  Bounds b{inf, -inf, inf, -inf};
  for (const auto& s : plot.series) {
    for (double x : s.x) b.x_min = std::min(b.x_min, x), b.x_max = std::max(b.x_max, x);
    for (double y : s.y) b.y_min = std::min(b.y_min, y), b.y_max = std::max(b.y_max, y);
  }
  if (plot.marker_x) b.x_min = std::min(b.x_min, *plot.marker_x), b.x_max = std::max(b.x_max, *plot.marker_x);
  if (b.x_min > b.x_max) b = {0, 1, 0, 1};
  if (b.y_min > b.y_max) b.y_min = 0, b.y_max = 1;
  pad(b.x_min, b.x_max);
  pad(b.y_min, b.y_max);
  return b;
}

double to_pixel_x(double x, const Bounds& b, const Viewport& vp) {
  return vp.left + (x - b.x_min) / (b.x_max - b.x_min) * (vp.width - vp.left - vp.right);
}

double to_pixel_y(double y, const Bounds& b, const Viewport& vp) {
  return vp.top + (b.y_max - y) / (b.y_max - b.y_min) * (vp.height - vp.top - vp.bottom);
}

std::string render_svg(const Plot& plot, const Viewport& vp) {
  const Bounds b = plot_bounds(plot);
  const double x0 = vp.left, x1 = vp.width - vp.right;
  const double y0 = vp.top, y1 = vp.height - vp.bottom;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(vp.width) << "\" height=\"" << px(vp.height)
      << "\" viewBox=\"0 0 " << px(vp.width) << ' ' << px(vp.height) << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << px(vp.width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(plot.title) << "</text>\n";
  svg << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << px(x0) << "\" y1=\"" << px(y1) << "\" x2=\"" << px(x1) << "\" y2=\"" << px(y1) << "\"/>\n"
      << "<line x1=\"" << px(x0) << "\" y1=\"" << px(y0) << "\" x2=\"" << px(x0) << "\" y2=\"" << px(y1) << "\"/>\n"
      << "</g>\n";

  svg << "<g class=\"ticks\" font-size=\"11\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = b.x_min + (b.x_max - b.x_min) * i / 4.0;
    const double yv = b.y_min + (b.y_max - b.y_min) * i / 4.0;
    const double xp = to_pixel_x(xv, b, vp), yp = to_pixel_y(yv, b, vp);
    svg << "<line x1=\"" << px(xp) << "\" y1=\"" << px(y1) << "\" x2=\"" << px(xp) << "\" y2=\"" << px(y1 + 5)
        << "\" stroke=\"black\"/>"
        << "<text x=\"" << px(xp) << "\" y=\"" << px(y1 + 18) << "\" text-anchor=\"middle\">" << tick_label(xv)
        << "</text>\n";
    svg << "<line x1=\"" << px(x0 - 5) << "\" y1=\"" << px(yp) << "\" x2=\"" << px(x0) << "\" y2=\"" << px(yp)
        << "\" stroke=\"black\"/>"
        << "<text x=\"" << px(x0 - 8) << "\" y=\"" << px(yp + 4) << "\" text-anchor=\"end\">" << tick_label(yv)
        << "</text>\n";
  }
  svg << "</g>\n";
  svg << "<text x=\"" << px((x0 + x1) / 2) << "\" y=\"" << px(vp.height - 8) << "\" text-anchor=\"middle\" font-size=\"12\">"
      << escape(plot.x_label) << "</text>\n";
  svg << "<text x=\"14\" y=\"" << px((y0 + y1) / 2) << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 "
      << px((y0 + y1) / 2) << ")\">" << escape(plot.y_label) << "</text>\n";

  for (std::size_t i = 0; i < plot.series.size(); ++i) {
    const auto& s = plot.series[i];
    svg << "<polyline class=\"series\" data-label=\"" << escape(s.label) << "\" fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      svg << (k ? " " : "") << px(to_pixel_x(s.x[k], b, vp)) << ',' << px(to_pixel_y(s.y[k], b, vp));
    }
    svg << "\"/>\n";
    const double ly = y0 + 14 + 16 * static_cast<double>(i);
    svg << "<line x1=\"" << px(x1 - 120) << "\" y1=\"" << px(ly - 4) << "\" x2=\"" << px(x1 - 100) << "\" y2=\""
        << px(ly - 4) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>"
        << "<text x=\"" << px(x1 - 95) << "\" y=\"" << px(ly) << "\" font-size=\"11\">" << escape(s.label)
        << "</text>\n";
  }

  if (plot.marker_x) {
    const double mx = to_pixel_x(*plot.marker_x, b, vp);
    svg << "<line class=\"marker\" x1=\"" << px(mx) << "\" y1=\"" << px(y0) << "\" x2=\"" << px(mx) << "\" y2=\""
        << px(y1) << "\" stroke=\"#d62728\" stroke-dasharray=\"4 3\"/>\n";
    if (!plot.marker_label.empty()) {
      svg << "<text x=\"" << px(mx + 4) << "\" y=\"" << px(y0 + 12) << "\" font-size=\"11\" fill=\"#d62728\">"
          << escape(plot.marker_label) << "</text>\n";
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_svg(const fs::path& path, const Plot& plot) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open for writing", path.string());
  out << render_svg(plot);
  if (!out) throw Error(ErrorCode::Io, "write failed", path.string());
}

std::vector<fs::path> render_simulation_plots(const SimulationResult<double>& result, const fs::path& dir) {
  std::vector<fs::path> written;
  if (result.empty()) return written;
  fs::create_directories(dir);

  Plot ages{"Age structure", "age z (years)", "density (employees/year of age)", {}, {}, {}};
  ages.series.push_back(profile_series(result.snapshots.front().rho, "t = " + tick_label(result.snapshots.front().t),
                                       "#1f77b4"));
  if (result.snapshots.size() > 1) {
    ages.series.push_back(profile_series(result.snapshots.back().rho, "t = " + tick_label(result.snapshots.back().t),
                                         "#ff7f0e"));
  }
  written.push_back(dir / "age_structure.svg");
  write_svg(written.back(), ages);

  Plot headcount{"Headcount", "time t (years)", "P(t) (employees)", {}, {}, {}};
  headcount.series.push_back({"P(t)", result.times, result.headcount, "#2ca02c"});
  written.push_back(dir / "headcount.svg");
  write_svg(written.back(), headcount);

  if (!result.budget.empty()) {
    Plot budget{"Total budget", "time t (years)", "budget (currency/year)", {}, {}, {}};
    budget.series.push_back({"budget", result.times, result.budget, "#9467bd"});
    written.push_back(dir / "budget.svg");
    write_svg(written.back(), budget);
  }
  return written;
}

fs::path render_equilibrium_plot(const EquilibriumReport<double>& report, const fs::path& dir) {
  fs::create_directories(dir);
  Plot plot{"Equilibrium age structure", "age z (years)", "density (employees/year of age)", {}, {}, {}};
  plot.series.push_back(profile_series(report.rho_eq, "rho_eq", "#1f77b4"));
  const fs::path path = dir / "rho_eq.svg";
  write_svg(path, plot);
  return path;
}

std::vector<fs::path> render_policy_plots(const OptimizerCurves<double>& curves, const OptimalPolicy<double>& policy,
                                          const AgeProfile<double>& omega, const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<fs::path> written;

  Plot d{"Cost per unit of knowledge", "hiring age z (years)", "d(z)", {}, policy.z0, "z0 = " + tick_label(policy.z0)};
  d.series.push_back(profile_series(curves.d, "d(z)", "#1f77b4"));
  written.push_back(dir / "d.svg");
  write_svg(written.back(), d);

  Plot w{"Cost per employee", "age z (years)", "omega(z) (currency/year)", {}, {}, {}};
  w.series.push_back(profile_series(omega, "omega(z)", "#8c564b"));
  written.push_back(dir / "omega.svg");
  write_svg(written.back(), w);

  Plot rho{"Optimal age structure", "age z (years)", "density (employees/year of age)", {}, {}, {}};
  rho.series.push_back(profile_series(policy.rho_star, "rho*", "#2ca02c"));
  written.push_back(dir / "rho_star.svg");
  write_svg(written.back(), rho);
  return written;
}

}  // namespace swp::io
