#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace plap {

// Machine-readable failure categories. Every failure path in the library and
// the CLI maps to exactly one of these.
enum class ErrorCode {
  parameter_out_of_range,
  mesh_invalid,
  mesh_mismatch,
  load_invalid,
  io_read,
  io_write,
  config_parse,
  config_unknown_key,
  config_missing_key,
  config_invalid_value,
  solver_nonconvergence,
  acceptance_failure,
};

std::string_view error_code_name(ErrorCode code);

// Process exit status for a failure category: 2 config/input, 3 solver, 4 acceptance.
int exit_status(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace plap
