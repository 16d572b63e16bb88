#ifndef FRACP_RUNNER_HPP
#define FRACP_RUNNER_HPP

#include <string>
#include <vector>

#include "fracp/config.hpp"

namespace fracp::cli {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitBadConfig = 1;       // also: stale inventory files
inline constexpr int kExitNonconvergence = 2;
inline constexpr int kExitHypothesesFail = 3;
inline constexpr int kExitNoThird = 4;         // only the constant-sign pair found
inline constexpr int kExitAuditIncomplete = 5;

/// Writes eigen.csv (x, e1, e1_over_ds) and lambda1 into report.json.
int run_eigen(const RunConfig& cfg, const std::string& out_dir);

/// Writes the hypothesis report into report.json; 0 iff all four pass.
int run_verify(const RunConfig& cfg, const std::string& out_dir);

/// Full pipeline: verify -> eigen -> constant-sign pair -> third solution ->
/// audit (p = 2). Emits u_plus.csv, u_minus.csv, u_third.csv, optional
/// trace_*.csv, and report.json.
int run_solve(const RunConfig& cfg, const std::string& out_dir);

/// Loads saved critical-point CSVs from inventory_dir (the zero point is
/// always part of the inventory), re-verifies residuals, and runs the signed
/// count audit.
int run_audit(const RunConfig& cfg, const std::string& out_dir,
              const std::string& inventory_dir);

/// Full command-line entry point; returns the process exit code.
int dispatch(const std::vector<std::string>& args);

}  // namespace fracp::cli

#endif
