#include "swp/io/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "swp/errors.hpp"

namespace swp::io {

namespace fs = std::filesystem;

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::ofstream open_for_write(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot open for writing", path.string());
  return out;
}

}  // namespace

double parse_number(const std::string& text, const std::string& where) {
  const std::string t = trim(text);
  double value = 0;
  const char* begin = t.data();
  const char* end = begin + t.size();
  if (!t.empty() && *begin == '+') ++begin;
  const auto res = std::from_chars(begin, end, value);
  if (t.empty() || res.ec != std::errc() || res.ptr != end) {
    throw Error(ErrorCode::InvalidValue, "not a number: '" + t + "'", where);
  }
  return value;
}

void write_csv(const fs::path& path, const std::vector<std::string>& header, const Table& rows) {
  auto out = open_for_write(path);
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_number(row[c]);
    out << '\n';
  }
  if (!out) throw Error(ErrorCode::Io, "write failed", path.string());
}

CsvData read_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open file", path.string());
  CsvData data;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split(line);
    if (data.header.empty()) {
      data.header = std::move(cells);
      continue;
    }
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (cells.size() != data.header.size()) {
      throw Error(ErrorCode::Configuration,
                  "expected " + std::to_string(data.header.size()) + " columns, found " + std::to_string(cells.size()),
                  where);
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) row.push_back(parse_number(cell, where));
    data.rows.push_back(std::move(row));
  }
  if (data.header.empty()) throw Error(ErrorCode::Configuration, "missing header line", path.string());
  return data;
}

void write_profile(const fs::path& path, const AgeProfile<double>& profile, const std::string& column) {
  Table rows;
  rows.reserve(static_cast<std::size_t>(profile.size()));
  for (Eigen::Index j = 0; j < profile.size(); ++j) rows.push_back({profile.grid.age(j), profile[j]});
  write_csv(path, {"z", column}, rows);
}

std::string snapshot_filename(std::size_t step) { return "profile_t" + std::to_string(step) + ".csv"; }

std::vector<fs::path> write_timeseries(const SimulationResult<double>& result, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create output directory: " + ec.message(), dir.string());

  const bool budget = result.model == ModelKind::Budget;
  std::vector<fs::path> written;
  auto emit = [&](const char* name, const std::vector<std::string>& header, const Table& rows) {
    written.push_back(dir / name);
    write_csv(written.back(), header, rows);
  };

  const std::size_t n = result.times.size();
  Table headcount, hiring, budget_rows, entropy_rows;
  for (std::size_t k = 0; k < n; ++k) {
    headcount.push_back({result.times[k], result.headcount[k]});
    if (budget) {
      const auto& terms = result.hiring_terms[k];
      hiring.push_back({result.times[k], result.hiring[k], terms.attrition, terms.retirement, terms.aging});
      budget_rows.push_back({result.times[k], result.budget[k]});
      entropy_rows.push_back({result.times[k], result.entropy[k]});
    } else {
      hiring.push_back({result.times[k], result.hiring[k]});
    }
  }
  emit("headcount.csv", {"t", "P"}, headcount);
  if (budget) {
    emit("hiring.csv", {"t", "h", "attrition_term", "retirement_term", "aging_term"}, hiring);
    emit("budget.csv", {"t", "budget"}, budget_rows);
    emit("entropy.csv", {"t", "H"}, entropy_rows);
  } else {
    emit("hiring.csv", {"t", "h"}, hiring);
  }

  // Snapshot times are exact multiples of the step, so the step index is recovered from the time axis.
  std::size_t k = 0;
  for (const auto& snap : result.snapshots) {
    while (k < n && result.times[k] != snap.t) ++k;
    if (k == n) throw Error(ErrorCode::Configuration, "snapshot time " + format_number(snap.t) + " is not on the time axis");
    written.push_back(dir / snapshot_filename(k));
    write_profile(written.back(), snap.rho);
  }
  return written;
}

SimulationResult<double> read_timeseries(const fs::path& dir, const AgeGrid<double>& grid) {
  SimulationResult<double> result;
  const CsvData headcount = read_csv(dir / "headcount.csv");
  for (const auto& row : headcount.rows) {
    result.times.push_back(row[0]);
    result.headcount.push_back(row[1]);
  }
  const CsvData hiring = read_csv(dir / "hiring.csv");
  result.model = hiring.header.size() == 5 ? ModelKind::Budget : ModelKind::Saturating;
  if (hiring.rows.size() != result.times.size()) {
    throw Error(ErrorCode::Configuration, "row count differs from headcount.csv", (dir / "hiring.csv").string());
  }
  for (const auto& row : hiring.rows) {
    result.hiring.push_back(row[1]);
    if (result.model == ModelKind::Budget) result.hiring_terms.push_back({row[2], row[3], row[4]});
  }
  if (result.model == ModelKind::Budget) {
    for (const auto& row : read_csv(dir / "budget.csv").rows) result.budget.push_back(row[1]);
    for (const auto& row : read_csv(dir / "entropy.csv").rows) result.entropy.push_back(row[1]);
  }

  std::map<std::size_t, fs::path> snapshots;
  if (fs::exists(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("profile_t", 0) != 0 || entry.path().extension() != ".csv") continue;
      const std::string digits = name.substr(9, name.size() - 9 - 4);
      std::size_t step = 0;
      const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), step);
      if (res.ec != std::errc() || res.ptr != digits.data() + digits.size()) continue;
      snapshots.emplace(step, entry.path());
    }
  }
  for (const auto& [step, path] : snapshots) {
    if (step >= result.times.size()) {
      throw Error(ErrorCode::Configuration, "snapshot step beyond the time axis", path.string());
    }
    const CsvData data = read_csv(path);
    if (static_cast<Eigen::Index>(data.rows.size()) != grid.nodes()) {
      throw Error(ErrorCode::Configuration, "snapshot does not match the grid", path.string());
    }
    AgeProfile<double> rho(grid);
    for (Eigen::Index j = 0; j < grid.nodes(); ++j) rho[j] = data.rows[static_cast<std::size_t>(j)][1];
    result.snapshots.push_back({result.times[step], std::move(rho)});
  }
  return result;
}

}  // namespace swp::io
