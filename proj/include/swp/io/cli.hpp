#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace swp::cli {

/// Runs one `swp` invocation. `args` excludes the program name.
/// Returns the process exit status: 0 success (warnings included), 1 validation,
/// 2 infeasible calibration, 3 step size outside the stability bound.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// --out when given, otherwise $SWP_OUT_DIR/<scenario name>, otherwise ./swp-out/<scenario name>.
std::filesystem::path output_directory(const std::optional<std::string>& out_flag, const std::string& scenario_name);

}  // namespace swp::cli
