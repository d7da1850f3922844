#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "robosnn/data.hpp"
#include "robosnn/loss.hpp"
#include "robosnn/nn.hpp"

namespace robosnn {

struct AdamConfig {
  double eta = 1e-3;    ///< learning rate
  double beta1 = 0.9;
  double beta2 = 0.999;
  double delta = 1e-8;  ///< added to sqrt(v_hat) in the denominator

  void validate() const;
};

/// First/second moment buffers and step counter for one network.
class AdamState {
 public:
  AdamState(const Network& net, AdamConfig config);

  /// Applies one bias-corrected Adam update to `net`. The step counter is
  /// advanced before the corrections are computed.
  void step(Network& net, const GradientBuffer& grad);

  std::uint64_t t() const { return t_; }
  const AdamConfig& config() const { return config_; }
  const GradientBuffer& first_moment() const { return m_; }
  const GradientBuffer& second_moment() const { return v_; }

 private:
  AdamConfig config_;
  GradientBuffer m_;
  GradientBuffer v_;
  std::uint64_t t_ = 0;
};

struct TrainConfig {
  int max_epochs = 200;
  std::size_t batch_size = 32;
  int patience = 5;
  double l2_coeff = 0.0;
  std::uint64_t seed = 0;
  LossSpec loss;
  AdamConfig adam;
  /// Trailing share of the training windows held out for early stopping.
  double validation_fraction = 0.1;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;  ///< 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  bool operator==(const EpochRecord&) const = default;
};

struct TrainingHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  bool stopped_early = false;

  bool operator==(const TrainingHistory&) const = default;
};

/// epoch,train_loss,val_loss,stopped_early (the flag is set on the final row only).
void write_history_csv(std::ostream& out, const TrainingHistory& history);

struct TrainResult {
  Network network;  ///< parameters of the best validation epoch
  TrainingHistory history;
};

/// Index ranges of the fit / validation / test partitions used by `train`.
struct TrainPartition {
  std::size_t fit_end = 0;  ///< windows [0, fit_end) are fitted
  std::size_t val_end = 0;  ///< windows [fit_end, val_end) drive early stopping
};

TrainPartition partition(const WindowedDataset& data, double validation_fraction);

/// Mini-batch Adam training with early stopping on validation loss.
TrainResult train(Network net, const WindowedDataset& data, const TrainConfig& cfg);

/// (1/N) sum loss(y_i - f(x_i)) + l2_coeff * 0.5 * ||theta||^2.
double empirical_risk(const Network& net, std::span<const std::vector<double>> inputs,
                      std::span<const double> targets, const LossSpec& spec,
                      double l2_coeff = 0.0);

double squared_norm(const Network& net);

/// Forecasts for windows [begin, end) of `data`, in normalized units.
std::vector<double> predict(const Network& net, const WindowedDataset& data, std::size_t begin,
                            std::size_t end);

}  // namespace robosnn
