#include "robosnn/optim.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>

#include "robosnn/error.hpp"
#include "robosnn/rng.hpp"

namespace robosnn {

void AdamConfig::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) raise(Errc::invalid_parameter, "learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    raise(Errc::invalid_parameter, "Adam betas must lie in [0, 1)");
  }
  if (!(delta > 0.0)) raise(Errc::invalid_parameter, "Adam delta must be positive");
}

AdamState::AdamState(const Network& net, AdamConfig config)
    : config_(config), m_(GradientBuffer::zeros_like(net)), v_(GradientBuffer::zeros_like(net)) {
  config_.validate();
}

void AdamState::step(Network& net, const GradientBuffer& grad) {
  if (!grad.congruent_with(net) || !m_.congruent_with(net)) {
    raise(Errc::dimension_mismatch, "gradient does not match the network shape");
  }
  if (!grad.all_finite()) raise(Errc::non_finite, "gradient contains non-finite values");

  ++t_;
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double t = static_cast<double>(t_);
  const double c1 = 1.0 - std::pow(b1, t);
  const double c2 = 1.0 - std::pow(b2, t);

  auto update = [&](std::vector<double>& theta, const std::vector<double>& g, std::vector<double>& m,
                    std::vector<double>& v) {
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      theta[i] -= config_.eta * m_hat / (std::sqrt(v_hat) + config_.delta);
    }
  };

  auto& layers = net.mutable_layers();
  for (std::size_t li = 0; li < layers.size(); ++li) {
    update(layers[li].weights, grad.layers[li].weights, m_.layers[li].weights, v_.layers[li].weights);
    update(layers[li].bias, grad.layers[li].bias, m_.layers[li].bias, v_.layers[li].bias);
  }
}

void TrainConfig::validate() const {
  if (max_epochs <= 0) raise(Errc::invalid_parameter, "max_epochs must be positive");
  if (batch_size == 0) raise(Errc::invalid_parameter, "batch_size must be positive");
  if (patience <= 0) raise(Errc::invalid_parameter, "patience must be positive");
  if (!(l2_coeff >= 0.0) || !std::isfinite(l2_coeff)) {
    raise(Errc::invalid_parameter, "l2_coeff must be non-negative");
  }
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    raise(Errc::invalid_parameter, "validation_fraction must lie in (0, 1)");
  }
  loss.validate();
  adam.validate();
}

void write_history_csv(std::ostream& out, const TrainingHistory& history) {
  out << "epoch,train_loss,val_loss,stopped_early\n" << std::setprecision(17);
  for (std::size_t i = 0; i < history.epochs.size(); ++i) {
    const auto& e = history.epochs[i];
    const bool last = i + 1 == history.epochs.size();
    out << e.epoch << ',' << e.train_loss << ',' << e.val_loss << ','
        << (last && history.stopped_early ? 1 : 0) << '\n';
  }
}

double squared_norm(const Network& net) {
  double s = 0.0;
  for (const auto& l : net.layers()) {
    for (double w : l.weights) s += w * w;
    for (double b : l.bias) s += b * b;
  }
  return s;
}

double empirical_risk(const Network& net, std::span<const std::vector<double>> inputs,
                      std::span<const double> targets, const LossSpec& spec, double l2_coeff) {
  if (inputs.size() != targets.size()) raise(Errc::length_mismatch, "inputs and targets differ in length");
  if (inputs.empty()) raise(Errc::empty_input, "empirical risk of an empty batch");
  ForwardCache cache;
  double sum = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    sum += loss_value(spec, targets[i] - forward(net, inputs[i], cache));
  }
  instrumentation::counters().loss_evaluations += inputs.size();
  double risk = sum / static_cast<double>(inputs.size());
  if (l2_coeff > 0.0) risk += l2_coeff * 0.5 * squared_norm(net);
  return risk;
}

std::vector<double> predict(const Network& net, const WindowedDataset& data, std::size_t begin,
                            std::size_t end) {
  if (begin > end || end > data.size()) raise(Errc::invalid_range, "prediction range out of bounds");
  ForwardCache cache;
  std::vector<double> out;
  out.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) out.push_back(forward(net, data.inputs[i], cache));
  return out;
}

TrainPartition partition(const WindowedDataset& data, double validation_fraction) {
  const std::size_t n = data.train_size();
  if (n < 2) raise(Errc::dataset_too_small, "need at least two training windows");
  auto n_val = static_cast<std::size_t>(std::floor(validation_fraction * static_cast<double>(n)));
  n_val = std::clamp<std::size_t>(n_val, 1, n - 1);
  return {n - n_val, n};
}

TrainResult train(Network net, const WindowedDataset& data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.size() == 0) raise(Errc::empty_input, "dataset is empty");
  if (net.input_dim() != data.seq_size) {
    raise(Errc::dimension_mismatch, "network input width does not match the window length");
  }
  const TrainPartition part = partition(data, cfg.validation_fraction);
  const std::size_t n_fit = part.fit_end;
  if (cfg.batch_size > n_fit) {
    raise(Errc::dataset_too_small, "batch size " + std::to_string(cfg.batch_size) +
                                       " exceeds the " + std::to_string(n_fit) + " fitting windows");
  }

  const std::span<const std::vector<double>> val_inputs(data.inputs.data() + part.fit_end,
                                                        part.val_end - part.fit_end);
  const std::span<const double> val_targets(data.targets.data() + part.fit_end,
                                            part.val_end - part.fit_end);

  AdamState adam(net, cfg.adam);
  GradientBuffer grad = GradientBuffer::zeros_like(net);
  ForwardCache cache;
  Rng rng(derive_seed(cfg.seed, 0x7261696eu));

  std::vector<std::size_t> order(n_fit);
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainResult result{net, {}};
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;

    for (std::size_t start = 0; start < n_fit; start += cfg.batch_size) {
      const std::size_t stop = std::min(start + cfg.batch_size, n_fit);
      const double inv_n = 1.0 / static_cast<double>(stop - start);
      grad.set_zero();
      double batch_loss = 0.0;
      for (std::size_t k = start; k < stop; ++k) {
        const std::size_t i = order[k];
        const double r = data.targets[i] - forward(net, data.inputs[i], cache);
        if (!std::isfinite(r)) {
          raise(Errc::divergence, "network output became non-finite at epoch " + std::to_string(epoch));
        }
        batch_loss += loss_value(cfg.loss, r);
        // r = y - f, so dL/df = -dL/dr.
        accumulate_backward(net, cache, -loss_grad(cfg.loss, r) * inv_n, grad);
      }
      instrumentation::counters().loss_evaluations += stop - start;

      double risk = batch_loss * inv_n;
      if (cfg.l2_coeff > 0.0) {
        risk += cfg.l2_coeff * 0.5 * squared_norm(net);
        const auto& layers = net.layers();
        for (std::size_t li = 0; li < layers.size(); ++li) {
          for (std::size_t j = 0; j < layers[li].weights.size(); ++j) {
            grad.layers[li].weights[j] += cfg.l2_coeff * layers[li].weights[j];
          }
          for (std::size_t j = 0; j < layers[li].bias.size(); ++j) {
            grad.layers[li].bias[j] += cfg.l2_coeff * layers[li].bias[j];
          }
        }
      }
      if (!std::isfinite(risk) || !grad.all_finite()) {
        raise(Errc::divergence, "training risk became non-finite at epoch " + std::to_string(epoch));
      }
      epoch_loss += risk * static_cast<double>(stop - start);
      adam.step(net, grad);
    }

    double val = 0.0;
    try {
      val = empirical_risk(net, val_inputs, val_targets, cfg.loss);
    } catch (const Error& e) {
      if (e.code() != Errc::non_finite) throw;
      val = std::numeric_limits<double>::quiet_NaN();
    }
    if (!std::isfinite(val)) {
      raise(Errc::divergence, "validation loss became non-finite at epoch " + std::to_string(epoch));
    }
    result.history.epochs.push_back({epoch, epoch_loss / static_cast<double>(n_fit), val});

    if (val < best_val) {
      best_val = val;
      result.network = net;
      result.history.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      result.history.stopped_early = true;
      break;
    }
  }
  return result;
}

}  // namespace robosnn
