#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace robosnn {

enum class Activation { ReLU, Identity };

/// Fully connected layer. Weights are stored row-major, out_dim x in_dim.
struct DenseLayer {
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  std::vector<double> weights;
  std::vector<double> bias;
  Activation activation = Activation::Identity;

  double& weight(std::size_t row, std::size_t col) { return weights[row * in_dim + col]; }
  double weight(std::size_t row, std::size_t col) const { return weights[row * in_dim + col]; }
  std::size_t parameter_count() const { return weights.size() + bias.size(); }
};

/// Dense feedforward regressor: ReLU hidden layers, linear scalar output.
class Network {
 public:
  Network() = default;
  /// Validates dimension chaining, finiteness and the scalar output.
  explicit Network(std::vector<DenseLayer> layers);

  std::size_t input_dim() const { return layers_.empty() ? 0 : layers_.front().in_dim; }
  std::size_t depth() const { return layers_.size(); }
  std::size_t parameter_count() const;

  const std::vector<DenseLayer>& layers() const { return layers_; }
  /// Mutable access for optimizers; shapes must not be changed.
  std::vector<DenseLayer>& mutable_layers() { return layers_; }

  bool operator==(const Network& other) const;

 private:
  std::vector<DenseLayer> layers_;
};

/// Parameter-shaped buffer (gradients, Adam moments).
struct GradientBuffer {
  struct Layer {
    std::vector<double> weights;
    std::vector<double> bias;
  };
  std::vector<Layer> layers;

  static GradientBuffer zeros_like(const Network& net);
  void set_zero();
  bool congruent_with(const Network& net) const;
  bool all_finite() const;
};

/// Per-layer activations kept by a forward pass for reuse by backward.
struct ForwardCache {
  std::vector<std::vector<double>> activations;  // activations[0] is the input
  std::vector<std::vector<double>> deltas;       // scratch for backward
};

double forward(const Network& net, std::span<const double> x);

/// Forward pass that records activations into `cache`.
double forward(const Network& net, std::span<const double> x, ForwardCache& cache);

/// Gradient of upstream * f(x; theta) with respect to every parameter.
GradientBuffer backward(const Network& net, std::span<const double> x, double upstream);

/// Adds upstream * d f / d theta into `grad`, using activations from the last
/// forward(net, x, cache) call. ReLU'(0) is taken as 0.
void accumulate_backward(const Network& net, ForwardCache& cache, double upstream,
                         GradientBuffer& grad);

/// dims = {input, hidden..., 1}. He-uniform weights with bound sqrt(6 / fan_in), zero biases.
Network init_network(std::span<const std::size_t> dims, std::uint64_t seed);

/// {input_dim, units x hidden_layers, 1}.
std::vector<std::size_t> mlp_dims(std::size_t input_dim, std::size_t hidden_layers, std::size_t units);

/// Frobenius norm of each weight matrix (biases excluded).
std::vector<double> frobenius_norms(const Network& net);

double relu(double z) noexcept;

// Versioned checkpoint document.
std::string network_to_json(const Network& net);
Network network_from_json(const std::string& text);

namespace instrumentation {

/// Per-thread operation counters used to check the cost model of training.
struct Counters {
  std::uint64_t multiply_adds = 0;
  std::uint64_t loss_evaluations = 0;
};

Counters& counters() noexcept;
void reset() noexcept;

}  // namespace instrumentation

}  // namespace robosnn
