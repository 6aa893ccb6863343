#pragma once

#include <stdexcept>
#include <string>

namespace lend {

enum class ErrCode {
  bad_config,
  bad_argument,
  bad_class_count,
  bad_rate,
  rate_majority,
  partner_fixed_point,
  dimension_mismatch,
  malformed_header,
  row_length_mismatch,
  label_out_of_range,
  unknown_id,
  empty_input,
  io_failure,
  degenerate_row,
  non_finite,
};

// Process exit codes used by the CLI.
enum ExitCode : int {
  exit_ok = 0,
  exit_config = 2,
  exit_data = 3,
  exit_numeric = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrCode code() const noexcept { return code_; }

  int exit_code() const noexcept {
    switch (code_) {
      case ErrCode::bad_config:
      case ErrCode::bad_argument:
        return exit_config;
      case ErrCode::non_finite:
        return exit_numeric;
      default:
        return exit_data;
    }
  }

 private:
  ErrCode code_;
};

}  // namespace lend
