#include "multithresh/error.hpp"

namespace multithresh {

const char*
to_string(ErrorCode code)
{
  switch (code) {
    case ErrorCode::unsupported_name: return "unsupported-name";
    case ErrorCode::depth_out_of_range: return "depth-out-of-range";
    case ErrorCode::index_out_of_range: return "index-out-of-range";
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::invalid_level_range: return "invalid-level-range";
    case ErrorCode::shape_mismatch: return "shape-mismatch";
    case ErrorCode::n_too_small: return "n-too-small";
    case ErrorCode::invalid_bound: return "invalid-B";
    case ErrorCode::empty_data: return "empty-data";
    case ErrorCode::non_finite_risk: return "non-finite-risk";
    case ErrorCode::non_density_target: return "non-density-target";
    case ErrorCode::noise_range_violation: return "noise-range-violation";
    case ErrorCode::degenerate_x: return "degenerate-x";
    case ErrorCode::mixed_configuration: return "mixed-configuration";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::config_invalid: return "config-invalid";
  }
  return "unknown";
}

bool
is_data_error(ErrorCode code)
{
  switch (code) {
    case ErrorCode::parse_error:
    case ErrorCode::empty_data:
    case ErrorCode::non_finite_risk:
    case ErrorCode::noise_range_violation:
    case ErrorCode::mixed_configuration:
    case ErrorCode::n_too_small:
      return true;
    default:
      return false;
  }
}

} // namespace multithresh
