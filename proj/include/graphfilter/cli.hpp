#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "graphfilter/error.hpp"
#include "graphfilter/filter.hpp"

namespace graphfilter {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitNumerical = 3,
};

/// Options shared by all subcommands; each reads the fields it needs.
struct RunConfig {
  std::string command;
  std::string graph_path;
  std::string features_path;  // empty: random features from `seed`
  std::size_t feature_dim = 4;
  std::string filter;         // preset name or FilterSpec JSON path
  ParamMap params;
  std::string output_path;    // empty: CSV on standard output
  double tolerance = 1e-8;
  std::uint64_t seed = 0;
  std::size_t grid_size = 256;

  std::string scheme = "LapSym";  // spectrum
  double lo = 0.0;                // response, fit, converge
  double hi = 2.0;
  std::string target = "step";    // fit, converge: step or the --filter response
  double threshold = 1.0;
  std::string family = "polynomial";
  std::size_t degree = 8;
  std::size_t den_degree = 0;     // 0: same as degree
  std::vector<std::size_t> degrees{4, 8, 16, 32, 64};
  std::vector<std::size_t> depths{0, 1, 2, 4, 8, 16, 32, 64, 128, 200};
  std::size_t window = 1;         // walkcheck
  std::size_t num_walks = 10000;
  std::size_t walk_length = 40;
  std::vector<std::size_t> sizes{1000, 2000, 4000, 8000};  // bench
  std::size_t repetitions = 11;
  std::size_t regular_degree = 16;
};

const std::vector<std::string>& command_names();

/// Fills `cfg` from a JSON object whose keys are the long flag names with
/// '-' replaced by '_'. Unknown keys raise InvalidConfig.
void load_config_json(const std::string& text, RunConfig& cfg);

/// Exit status for a library error.
int exit_code_for(ErrorCode code);

/// Runs one subcommand. CSV goes to `output_path` or `out`; `key=value`
/// summary lines go to `out`; a failure prints one `error=<code>` line to
/// `err` and returns a nonzero status.
int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace graphfilter
