#include "robosnn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "robosnn/error.hpp"

namespace robosnn {

namespace {

void check_finite(double r) {
  if (!std::isfinite(r)) raise(Errc::non_finite, "residual is not finite");
}

bool positive(double x) { return std::isfinite(x) && x > 0.0; }

// 1 - (1 + g) e^{-g} for g >= 0. Direct evaluation cancels for small g, so use
// the Taylor series sum_{k>=2} (-1)^k (k-1) g^k / k! there.
double saturation(double g) {
  if (g > 700.0) return 1.0;
  if (g < 0.25) {
    double term = g;  // g^k / k! for k = 1
    double sum = 0.0;
    for (int k = 2; k <= 24; ++k) {
      term *= g / k;
      const double c = static_cast<double>(k - 1) * term;
      sum += (k % 2 == 0) ? c : -c;
    }
    return sum;
  }
  return 1.0 - (g + 1.0) * std::exp(-g);
}

// a (sqrt(r^2 + eps) - sqrt(eps)), rewritten without subtraction and without
// squaring r, which would overflow for |r| > 1e154.
double robos_g(const LossSpec& s, double r, double root) {
  const double u = std::fabs(r);
  return s.a * u * (u / (root + std::sqrt(s.eps)));
}

std::string format_number(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  // Prefer the shortest representation that round-trips.
  for (int p = 1; p <= 17; ++p) {
    std::ostringstream t;
    t << std::setprecision(p) << x;
    if (std::stod(t.str()) == x) return t.str();
  }
  return os.str();
}

}  // namespace

void LossSpec::validate() const {
  switch (kind) {
    case LossKind::RoBoS:
      if (!positive(a) || !positive(lambda) || !positive(eps)) {
        raise(Errc::invalid_parameter, "RoBoS requires a > 0, lambda > 0, eps > 0");
      }
      break;
    case LossKind::Huber:
      if (!positive(delta)) raise(Errc::invalid_parameter, "Huber requires delta > 0");
      break;
    default:
      break;
  }
}

std::string LossSpec::to_string() const {
  std::string out(label(kind));
  if (kind == LossKind::RoBoS) {
    out += ":a=" + format_number(a) + ",lambda=" + format_number(lambda) +
           ",eps=" + format_number(eps);
  } else if (kind == LossKind::Huber) {
    out += ":delta=" + format_number(delta);
  }
  return out;
}

bool LossSpec::operator==(const LossSpec& other) const {
  if (kind != other.kind) return false;
  if (kind == LossKind::RoBoS) {
    return a == other.a && lambda == other.lambda && eps == other.eps;
  }
  if (kind == LossKind::Huber) return delta == other.delta;
  return true;
}

std::string_view label(LossKind kind) noexcept {
  switch (kind) {
    case LossKind::Square: return "mse";
    case LossKind::Absolute: return "mae";
    case LossKind::Huber: return "huber";
    case LossKind::LogCosh: return "logcosh";
    case LossKind::RoBoS: return "robos";
  }
  return "unknown";
}

LossSpec parse_loss_spec(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view name = text.substr(0, colon);
  LossSpec spec;
  if (name == "mse" || name == "square") {
    spec.kind = LossKind::Square;
  } else if (name == "mae" || name == "absolute") {
    spec.kind = LossKind::Absolute;
  } else if (name == "huber") {
    spec.kind = LossKind::Huber;
  } else if (name == "logcosh" || name == "log-cosh") {
    spec.kind = LossKind::LogCosh;
  } else if (name == "robos" || name == "robos-nn") {
    spec.kind = LossKind::RoBoS;
  } else {
    raise(Errc::usage, "unknown loss '" + std::string(name) + "'");
  }

  std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      raise(Errc::usage, "expected key=value in loss spec, got '" + std::string(item) + "'");
    }
    const std::string_view key = item.substr(0, eq);
    const std::string value_text(item.substr(eq + 1));
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(value_text, &used);
      if (used != value_text.size()) throw std::invalid_argument(value_text);
    } catch (const std::exception&) {
      raise(Errc::usage, "bad number '" + value_text + "' in loss spec");
    }
    if (key == "a") {
      spec.a = value;
    } else if (key == "lambda") {
      spec.lambda = value;
    } else if (key == "eps") {
      spec.eps = value;
    } else if (key == "delta") {
      spec.delta = value;
    } else {
      raise(Errc::usage, "unknown loss parameter '" + std::string(key) + "'");
    }
  }
  spec.validate();
  return spec;
}

double loss_value(const LossSpec& spec, double r) {
  spec.validate();
  check_finite(r);
  const double u = std::fabs(r);
  switch (spec.kind) {
    case LossKind::Square:
      return r * r;
    case LossKind::Absolute:
      return u;
    case LossKind::Huber:
      return u <= spec.delta ? 0.5 * r * r : spec.delta * (u - 0.5 * spec.delta);
    case LossKind::LogCosh:
      // log cosh u = u + log1p(e^{-2u}) - log 2, stable for large u.
      return u + std::log1p(std::exp(-2.0 * u)) - std::numbers::ln2;
    case LossKind::RoBoS: {
      const double root = std::hypot(r, std::sqrt(spec.eps));
      // Near saturation lambda * s rounds up to lambda; round toward zero instead
      // so the strict bound holds in floating point too.
      return std::min(spec.lambda * saturation(robos_g(spec, r, root)),
                      std::nextafter(spec.lambda, 0.0));
    }
  }
  return 0.0;
}

double loss_grad(const LossSpec& spec, double r) {
  spec.validate();
  check_finite(r);
  switch (spec.kind) {
    case LossKind::Square:
      return 2.0 * r;
    case LossKind::Absolute:
      return r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0);
    case LossKind::Huber:
      if (std::fabs(r) <= spec.delta) return r;
      return r > 0.0 ? spec.delta : -spec.delta;
    case LossKind::LogCosh:
      return std::tanh(r);
    case LossKind::RoBoS: {
      const double root = std::hypot(r, std::sqrt(spec.eps));
      const double g = robos_g(spec, r, root);
      if (g > 700.0) return 0.0;
      return spec.lambda * spec.a * r * g * std::exp(-g) / root;
    }
  }
  return 0.0;
}

std::vector<ProfilePoint> loss_profile(const LossSpec& spec, double r_min, double r_max,
                                       std::size_t n_points) {
  spec.validate();
  if (!std::isfinite(r_min) || !std::isfinite(r_max) || !(r_min < r_max)) {
    raise(Errc::invalid_range, "profile range requires r_min < r_max");
  }
  if (n_points < 2) raise(Errc::invalid_range, "profile needs at least 2 points");

  std::vector<ProfilePoint> points;
  points.reserve(n_points);
  const double step = (r_max - r_min) / static_cast<double>(n_points - 1);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double r = i + 1 == n_points ? r_max : r_min + step * static_cast<double>(i);
    points.push_back({r, loss_value(spec, r), loss_grad(spec, r)});
  }
  return points;
}

void write_profile_csv(std::ostream& out, const std::vector<ProfilePoint>& points) {
  out << "r,value,grad\n";
  out << std::setprecision(17);
  for (const auto& p : points) out << p.r << ',' << p.value << ',' << p.grad << '\n';
}

}  // namespace robosnn
