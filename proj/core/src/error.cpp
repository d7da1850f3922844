#include "robosnn/error.hpp"

namespace robosnn {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_parameter: return "invalid-parameter";
    case Errc::non_finite: return "non-finite-input";
    case Errc::invalid_range: return "invalid-range";
    case Errc::invalid_dims: return "invalid-dims";
    case Errc::dimension_mismatch: return "dimension-mismatch";
    case Errc::empty_input: return "empty-input";
    case Errc::length_mismatch: return "length-mismatch";
    case Errc::dataset_too_small: return "dataset-too-small";
    case Errc::divergence: return "divergence";
    case Errc::io: return "io";
    case Errc::column_missing: return "column-missing";
    case Errc::series_too_short: return "series-too-short";
    case Errc::invalid_fraction: return "invalid-fraction";
    case Errc::constant_series: return "constant-training-series";
    case Errc::domain: return "domain";
    case Errc::parse: return "parse";
    case Errc::usage: return "usage";
    case Errc::objective_failure: return "objective-failure";
  }
  return "unknown";
}

void raise(Errc code, const std::string& what) {
  throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace robosnn
