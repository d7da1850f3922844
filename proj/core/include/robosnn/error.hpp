#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace robosnn {

enum class Errc {
  invalid_parameter,
  non_finite,
  invalid_range,
  invalid_dims,
  dimension_mismatch,
  empty_input,
  length_mismatch,
  dataset_too_small,
  divergence,
  io,
  column_missing,
  series_too_short,
  invalid_fraction,
  constant_series,
  domain,
  parse,
  usage,
  objective_failure,
};

std::string_view to_string(Errc code) noexcept;

// Every failure raised by the library carries one of the codes above so that
// front ends can map it onto an exit status without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& what);

}  // namespace robosnn
