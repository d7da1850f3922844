#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "robosnn/data.hpp"
#include "robosnn/loss.hpp"
#include "robosnn/nn.hpp"

namespace robosnn {

/// Base of the logarithm inside sqrt(2 log(2) d). Natural by default; Two is
/// kept for sensitivity checks.
enum class LogBase { Natural, Two };

/// Inputs of the Rademacher-complexity generalization bound for a depth-d
/// network with per-layer Frobenius norm caps, trained with the RoBoS loss.
struct BoundInputs {
  double a = 1.0;          ///< loss shape parameter
  double B = 1.0;          ///< sup of the input Euclidean norm
  std::size_t d = 1;       ///< number of weight matrices
  std::vector<double> m_f; ///< Frobenius norm bound per layer, size d
  std::size_t n = 1;       ///< training sample count
  double eps_conf = 0.05;  ///< bound holds with probability 1 - eps_conf

  void validate() const;
};

/// 2 a B (sqrt(2 log(2) d) + 1) prod M_F(j) / (e sqrt n)
double capacity_term(const BoundInputs& in, LogBase base = LogBase::Natural);
/// sqrt(8 ln(1/eps_conf) / n)
double confidence_term(const BoundInputs& in);

/// Sum of the two terms above. Uses the Lipschitz constant a/e.
double generalization_bound(const BoundInputs& in, LogBase base = LogBase::Natural);

struct BoundReport {
  BoundInputs inputs;
  double lambda = 1.0;
  double bound = 0.0;
  /// Same bound with the derivative's actual Lipschitz constant lambda * a / e.
  double lipschitz_adjusted_bound = 0.0;
};

/// B is the largest training-window norm, n the number of training windows,
/// M_F(j) the current weight norms. `spec` must be a RoBoS loss.
BoundReport bound_report(const Network& net, const WindowedDataset& data, const LossSpec& spec,
                         double eps_conf);

/// {a, B, d, m_f[], n, eps_conf, bound, lipschitz_adjusted_bound}
std::string to_json(const BoundReport& report);

}  // namespace robosnn
