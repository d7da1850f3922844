#include "robosnn/theory.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numbers>

#include "robosnn/error.hpp"

namespace robosnn {

void BoundInputs::validate() const {
  if (!(eps_conf > 0.0 && eps_conf < 1.0)) raise(Errc::domain, "eps_conf must lie in (0, 1)");
  if (!(a > 0.0) || !std::isfinite(a)) raise(Errc::domain, "a must be positive");
  if (!(B >= 0.0) || !std::isfinite(B)) raise(Errc::domain, "B must be non-negative");
  if (d == 0 || n == 0) raise(Errc::domain, "d and n must be positive");
  if (m_f.size() != d) raise(Errc::domain, "m_f must hold one norm per layer");
  for (double m : m_f) {
    if (!(m >= 0.0) || !std::isfinite(m)) raise(Errc::domain, "Frobenius norms must be non-negative");
  }
}

double capacity_term(const BoundInputs& in, LogBase base) {
  in.validate();
  const double log2 = base == LogBase::Natural ? std::numbers::ln2 : 1.0;
  double prod = 1.0;
  for (double m : in.m_f) prod *= m;
  const double depth = static_cast<double>(in.d);
  return 2.0 * in.a * in.B * (std::sqrt(2.0 * log2 * depth) + 1.0) * prod /
         (std::numbers::e * std::sqrt(static_cast<double>(in.n)));
}

double confidence_term(const BoundInputs& in) {
  in.validate();
  return std::sqrt(8.0 * std::log(1.0 / in.eps_conf) / static_cast<double>(in.n));
}

double generalization_bound(const BoundInputs& in, LogBase base) {
  return capacity_term(in, base) + confidence_term(in);
}

BoundReport bound_report(const Network& net, const WindowedDataset& data, const LossSpec& spec,
                         double eps_conf) {
  if (spec.kind != LossKind::RoBoS) {
    raise(Errc::invalid_parameter, "the generalization bound is stated for the RoBoS loss");
  }
  spec.validate();
  if (data.train_size() == 0) raise(Errc::empty_input, "no training windows");
  if (net.input_dim() != data.seq_size) {
    raise(Errc::dimension_mismatch, "network input width does not match the window length");
  }

  BoundReport report;
  report.lambda = spec.lambda;
  auto& in = report.inputs;
  in.a = spec.a;
  in.eps_conf = eps_conf;
  in.n = data.train_size();
  in.d = net.depth();
  in.m_f = frobenius_norms(net);
  in.B = 0.0;
  for (std::size_t i = 0; i < data.train_size(); ++i) {
    double sq = 0.0;
    for (double x : data.inputs[i]) sq += x * x;
    in.B = std::max(in.B, std::sqrt(sq));
  }

  const double capacity = capacity_term(in);
  const double confidence = confidence_term(in);
  report.bound = capacity + confidence;
  report.lipschitz_adjusted_bound = spec.lambda * capacity + confidence;
  return report;
}

std::string to_json(const BoundReport& report) {
  const auto& in = report.inputs;
  const nlohmann::json j{{"a", in.a},
                         {"B", in.B},
                         {"d", in.d},
                         {"m_f", in.m_f},
                         {"n", in.n},
                         {"eps_conf", in.eps_conf},
                         {"lambda", report.lambda},
                         {"bound", report.bound},
                         {"lipschitz_adjusted_bound", report.lipschitz_adjusted_bound}};
  return j.dump(2);
}

}  // namespace robosnn
