#include "plap/error.hpp"

namespace plap {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::parameter_out_of_range: return "parameter_out_of_range";
    case ErrorCode::mesh_invalid: return "mesh_invalid";
    case ErrorCode::mesh_mismatch: return "mesh_mismatch";
    case ErrorCode::load_invalid: return "load_invalid";
    case ErrorCode::io_read: return "io_read";
    case ErrorCode::io_write: return "io_write";
    case ErrorCode::config_parse: return "config_parse";
    case ErrorCode::config_unknown_key: return "config_unknown_key";
    case ErrorCode::config_missing_key: return "config_missing_key";
    case ErrorCode::config_invalid_value: return "config_invalid_value";
    case ErrorCode::solver_nonconvergence: return "solver_nonconvergence";
    case ErrorCode::acceptance_failure: return "acceptance_failure";
  }
  return "unknown";
}

int exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::solver_nonconvergence: return 3;
    case ErrorCode::acceptance_failure: return 4;
    default: return 2;
  }
}

}  // namespace plap
