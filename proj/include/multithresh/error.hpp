#pragma once

#include <stdexcept>
#include <string>

namespace multithresh {

enum class ErrorCode
{
  unsupported_name,
  depth_out_of_range,
  index_out_of_range,
  invalid_argument,
  invalid_level_range,
  shape_mismatch,
  n_too_small,
  invalid_bound,
  empty_data,
  non_finite_risk,
  non_density_target,
  noise_range_violation,
  degenerate_x,
  mixed_configuration,
  parse_error,
  config_invalid,
};

const char* to_string(ErrorCode code);

//! Exception thrown by every module of the library. The code identifies
//! the failed precondition so callers (the CLI in particular) can map it
//! to an exit status.
class Error : public std::runtime_error
{
public:
  Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what)
    , code_(code)
  {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

//! True for errors caused by malformed input data rather than configuration.
bool is_data_error(ErrorCode code);

} // namespace multithresh
