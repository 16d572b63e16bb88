#ifndef FRACP_CONFIG_HPP
#define FRACP_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "fracp/solver.hpp"

namespace fracp {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parsed run configuration. Unknown keys are rejected and every module
/// precondition is checked at parse time.
struct RunConfig {
  // domain
  double a = 0.0, b = 1.0;
  int n = 256;
  // exponents
  double p = 2.0, s = 0.5;
  // reaction
  ReactionKind kind = ReactionKind::power;
  double q = 4.0;
  double r = 4.0;
  double c0 = 1.0;
  std::optional<std::string> table_path;
  // solver
  double tol = 1e-8;
  int max_iter = 20000;
  int path_nodes = 21;
  int multistart_count = 64;
  std::uint64_t seed = 0x243f6a8885a308d3ull;
  double phi_floor = -1e8;
  ThirdStrategy third_strategy = ThirdStrategy::both;
  // outputs
  std::string out_dir = "out";
  bool emit_traces = false;

  std::string raw_json;  // pretty echo of the parsed document

  Grid make_grid() const;
  ReactionSpec make_reaction() const;
};

/// Loads and validates a config file. Throws ConfigError with a
/// line-precise (or key-path) message on any violation.
RunConfig load_config(const std::string& path);

/// Parses config text (path is used only in error messages).
RunConfig parse_config(const std::string& text, const std::string& path);

}  // namespace fracp

#endif
