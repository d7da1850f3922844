#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace robosnn {

enum class LossKind { Square, Absolute, Huber, LogCosh, RoBoS };

/// Selects one of the five per-sample regression losses together with its
/// parameters. Fields not used by `kind` are ignored.
struct LossSpec {
  LossKind kind = LossKind::Square;
  double a = 1.0;       ///< RoBoS shape
  double lambda = 1.0;  ///< RoBoS bound (supremum of the loss)
  double eps = 0.01;    ///< RoBoS stability
  double delta = 1.0;   ///< Huber threshold

  static LossSpec square() { return {LossKind::Square}; }
  static LossSpec absolute() { return {LossKind::Absolute}; }
  static LossSpec huber(double delta) {
    LossSpec s{LossKind::Huber};
    s.delta = delta;
    return s;
  }
  static LossSpec log_cosh() { return {LossKind::LogCosh}; }
  static LossSpec robos(double a, double lambda, double eps) {
    return {LossKind::RoBoS, a, lambda, eps};
  }

  /// Throws Error(invalid_parameter) if the parameters used by `kind` are invalid.
  void validate() const;

  /// Canonical text form, e.g. "robos:a=1,lambda=0.5,eps=0.01" or "huber:delta=1".
  std::string to_string() const;

  bool operator==(const LossSpec& other) const;
};

/// Short table label: mae, mse, huber, logcosh, robos.
std::string_view label(LossKind kind) noexcept;

/// Parses the canonical text form. Accepts the aliases square/mse,
/// absolute/mae, logcosh/log-cosh, robos/robos-nn. Missing parameters keep
/// their defaults.
LossSpec parse_loss_spec(std::string_view text);

/// Per-sample loss of the signed residual r = y - yhat (no 1/n factor).
double loss_value(const LossSpec& spec, double r);

/// dL/dr. The Absolute loss uses the subgradient 0 at r = 0.
double loss_grad(const LossSpec& spec, double r);

struct ProfilePoint {
  double r;
  double value;
  double grad;
};

/// Uniform grid over [r_min, r_max], endpoints included.
std::vector<ProfilePoint> loss_profile(const LossSpec& spec, double r_min, double r_max,
                                       std::size_t n_points);

/// CSV with header r,value,grad.
void write_profile_csv(std::ostream& out, const std::vector<ProfilePoint>& points);

}  // namespace robosnn
