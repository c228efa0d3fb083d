#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "swp/grid.hpp"
#include "swp/simulation.hpp"

namespace swp::io {

/// Shortest decimal form that parses back to the same double.
std::string format_number(double value);
double parse_number(const std::string& text, const std::string& where);

using Table = std::vector<std::vector<double>>;

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header, const Table& rows);

struct CsvData {
  std::vector<std::string> header;
  Table rows;
};
CsvData read_csv(const std::filesystem::path& path);

/// Writes a `z,<column>` profile file.
void write_profile(const std::filesystem::path& path, const AgeProfile<double>& profile,
                   const std::string& column = "rho");

/// Output files of a simulation run:
///   headcount.csv  t,P
///   hiring.csv     t,h                                          (saturating)
///                  t,h,attrition_term,retirement_term,aging_term (budget)
///   budget.csv     t,budget   (budget model)
///   entropy.csv    t,H        (budget model)
///   profile_t<k>.csv  z,rho   one per snapshot, k = time-step index (t = times[k])
/// Returns the written paths.
std::vector<std::filesystem::path> write_timeseries(const SimulationResult<double>& result,
                                                    const std::filesystem::path& dir);

/// Reads back what write_timeseries produced. Snapshot profiles are placed on `grid`.
SimulationResult<double> read_timeseries(const std::filesystem::path& dir, const AgeGrid<double>& grid);

/// File name of the snapshot taken after `step` time steps.
std::string snapshot_filename(std::size_t step);

}  // namespace swp::io
