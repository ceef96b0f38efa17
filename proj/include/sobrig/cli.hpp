#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sobrig/report.hpp"

namespace sobrig {

enum class Command { constants, model, verify, rigidity, limits };

const char* to_string(Command c);

/// Bad flags or values; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Command command = Command::constants;
  int m = 0;
  double p = 0.0;
  std::vector<double> lambda_list{1.0};
  std::string g_spec = "zero";
  double t_max = 50.0;
  double step = 1e-3;
  double tol = 1e-8;
  /// nullopt means "estimate".
  std::optional<double> c_m;
  /// nullopt means "empirical".
  std::optional<double> gamma;
  double T = 1.0;
  Format output = Format::csv;
  std::optional<std::string> out_path;

  /// Flags that parse back to an identical config (program name excluded).
  std::vector<std::string> to_args() const;
  bool operator==(const RunConfig&) const = default;
};

/// --help was given; the help text has already been printed.
class HelpRequested : public std::exception {};

/// args excludes the program name. Throws UsageError or HelpRequested.
RunConfig parse_run_config(const std::vector<std::string>& args, std::ostream& out);

/// 0 = all checks pass, 1 = a check or a numerical step failed, 2 = usage error.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sobrig
