#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "plap/io.hpp"
#include "plap/optimizer.hpp"
#include "plap/plap_solver.hpp"

namespace plap::cli {

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "PLAP_OUTPUT_DIR";

struct RunConfig {
  std::string command = "solve";  // mesh | solve | optimize | derivative | suite

  // mesh generation
  std::string shape = "disk";
  int n = 64;
  int n_radial = 0;  // 0: default_radial_count(n)
  double size = 1.0;  // disk radius or square side

  std::string mesh_path;
  std::string load_path;  // empty: f = 1

  SolveConfig solve;

  // optimize
  int restarts = 0;
  int max_outer_iters = 100;
  double j_tol = 1e-12;
  int neighbour_budget = 256;

  // derivative
  std::string field = "sin:1";
  double t = 1e-3;
  double collar = 0.3;

  // suite
  std::string suite = "acceptance";
  std::vector<int> criteria;  // empty: all

  std::uint64_t seed = 0;
  std::string out;  // empty: default under $PLAP_OUTPUT_DIR

  /// Throws config_* errors (or io_read for missing input files).
  void validate() const;
  /// key=value pairs in config-file syntax.
  io::Echo echo() const;
  OptimizeConfig optimize_config() const;
};

/// key = value lines, '#' comments. Unknown or repeated keys, malformed lines
/// and invalid values are rejected with the offending line number. The
/// result is validated.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::string& source = "<string>");

/// Executes one subcommand; returns the process exit status. Library errors
/// propagate as plap::Error.
int run(const RunConfig& config);

/// Full command line entry point: parses flags, runs, prints
/// "error[<code>]: <message>" on failure and maps it to an exit status.
int main(int argc, const char* const* argv);

}  // namespace plap::cli
