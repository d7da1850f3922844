#include "robosnn/nn.hpp"

#include <algorithm>
#include <cmath>

#include "json_io.hpp"
#include "robosnn/error.hpp"
#include "robosnn/rng.hpp"

namespace robosnn {

namespace instrumentation {

Counters& counters() noexcept {
  thread_local Counters c;
  return c;
}

void reset() noexcept { counters() = Counters{}; }

}  // namespace instrumentation

namespace {

bool finite_all(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void check_input(const Network& net, std::span<const double> x) {
  if (net.depth() == 0) raise(Errc::invalid_dims, "network has no layers");
  if (x.size() != net.input_dim()) {
    raise(Errc::dimension_mismatch, "input has " + std::to_string(x.size()) +
                                        " values, network expects " +
                                        std::to_string(net.input_dim()));
  }
  for (double v : x) {
    if (!std::isfinite(v)) raise(Errc::non_finite, "network input is not finite");
  }
}

}  // namespace

double relu(double z) noexcept { return z > 0.0 ? z : 0.0; }

Network::Network(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) raise(Errc::invalid_dims, "network needs at least one layer");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (l.in_dim == 0 || l.out_dim == 0) raise(Errc::invalid_dims, "layer with zero width");
    if (l.weights.size() != l.in_dim * l.out_dim || l.bias.size() != l.out_dim) {
      raise(Errc::invalid_dims, "layer " + std::to_string(i) + " has inconsistent shapes");
    }
    if (i + 1 < layers_.size()) {
      if (l.out_dim != layers_[i + 1].in_dim) {
        raise(Errc::invalid_dims, "layer " + std::to_string(i) + " does not chain into the next");
      }
      if (l.activation != Activation::ReLU) {
        raise(Errc::invalid_dims, "hidden layers must use ReLU");
      }
    } else {
      if (l.out_dim != 1) raise(Errc::invalid_dims, "output layer must have one unit");
      if (l.activation != Activation::Identity) {
        raise(Errc::invalid_dims, "output layer must be linear");
      }
    }
    if (!finite_all(l.weights) || !finite_all(l.bias)) {
      raise(Errc::non_finite, "layer " + std::to_string(i) + " has non-finite parameters");
    }
  }
}

std::size_t Network::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.parameter_count();
  return n;
}

bool Network::operator==(const Network& other) const {
  if (layers_.size() != other.layers_.size()) return false;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& a = layers_[i];
    const auto& b = other.layers_[i];
    if (a.in_dim != b.in_dim || a.out_dim != b.out_dim || a.activation != b.activation ||
        a.weights != b.weights || a.bias != b.bias) {
      return false;
    }
  }
  return true;
}

GradientBuffer GradientBuffer::zeros_like(const Network& net) {
  GradientBuffer g;
  g.layers.reserve(net.depth());
  for (const auto& l : net.layers()) {
    g.layers.push_back({std::vector<double>(l.weights.size(), 0.0),
                        std::vector<double>(l.bias.size(), 0.0)});
  }
  return g;
}

void GradientBuffer::set_zero() {
  for (auto& l : layers) {
    std::fill(l.weights.begin(), l.weights.end(), 0.0);
    std::fill(l.bias.begin(), l.bias.end(), 0.0);
  }
}

bool GradientBuffer::congruent_with(const Network& net) const {
  if (layers.size() != net.depth()) return false;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].weights.size() != net.layers()[i].weights.size() ||
        layers[i].bias.size() != net.layers()[i].bias.size()) {
      return false;
    }
  }
  return true;
}

bool GradientBuffer::all_finite() const {
  return std::all_of(layers.begin(), layers.end(), [](const Layer& l) {
    return finite_all(l.weights) && finite_all(l.bias);
  });
}

double forward(const Network& net, std::span<const double> x, ForwardCache& cache) {
  check_input(net, x);
  const auto& layers = net.layers();
  cache.activations.resize(layers.size() + 1);
  cache.activations[0].assign(x.begin(), x.end());

  std::uint64_t madds = 0;
  for (std::size_t li = 0; li < layers.size(); ++li) {
    const auto& layer = layers[li];
    const auto& in = cache.activations[li];
    auto& out = cache.activations[li + 1];
    out.resize(layer.out_dim);
    for (std::size_t r = 0; r < layer.out_dim; ++r) {
      const double* w = layer.weights.data() + r * layer.in_dim;
      double z = layer.bias[r];
      for (std::size_t c = 0; c < layer.in_dim; ++c) z += w[c] * in[c];
      out[r] = layer.activation == Activation::ReLU ? relu(z) : z;
    }
    madds += layer.parameter_count();
  }
  instrumentation::counters().multiply_adds += madds;
  return cache.activations.back()[0];
}

double forward(const Network& net, std::span<const double> x) {
  ForwardCache cache;
  return forward(net, x, cache);
}

void accumulate_backward(const Network& net, ForwardCache& cache, double upstream,
                         GradientBuffer& grad) {
  const auto& layers = net.layers();
  if (cache.activations.size() != layers.size() + 1) {
    raise(Errc::dimension_mismatch, "forward cache does not match network");
  }
  if (!grad.congruent_with(net)) raise(Errc::dimension_mismatch, "gradient buffer shape mismatch");

  cache.deltas.resize(layers.size());
  cache.deltas.back().assign(1, upstream);

  std::uint64_t madds = 0;
  for (std::size_t li = layers.size(); li-- > 0;) {
    const auto& layer = layers[li];
    auto& delta = cache.deltas[li];
    // Output activations are post-ReLU; a zero output means the unit was inactive.
    if (layer.activation == Activation::ReLU) {
      const auto& out = cache.activations[li + 1];
      for (std::size_t r = 0; r < layer.out_dim; ++r) {
        if (!(out[r] > 0.0)) delta[r] = 0.0;
      }
    }
    const auto& in = cache.activations[li];
    auto& gl = grad.layers[li];
    for (std::size_t r = 0; r < layer.out_dim; ++r) {
      const double d = delta[r];
      gl.bias[r] += d;
      if (d == 0.0) continue;
      double* gw = gl.weights.data() + r * layer.in_dim;
      for (std::size_t c = 0; c < layer.in_dim; ++c) gw[c] += d * in[c];
    }
    madds += layer.parameter_count();
    if (li > 0) {
      auto& prev = cache.deltas[li - 1];
      prev.assign(layer.in_dim, 0.0);
      for (std::size_t r = 0; r < layer.out_dim; ++r) {
        const double d = delta[r];
        if (d == 0.0) continue;
        const double* w = layer.weights.data() + r * layer.in_dim;
        for (std::size_t c = 0; c < layer.in_dim; ++c) prev[c] += d * w[c];
      }
      madds += layer.weights.size();
    }
  }
  instrumentation::counters().multiply_adds += madds;
}

GradientBuffer backward(const Network& net, std::span<const double> x, double upstream) {
  if (!std::isfinite(upstream)) raise(Errc::non_finite, "upstream gradient is not finite");
  ForwardCache cache;
  forward(net, x, cache);
  GradientBuffer grad = GradientBuffer::zeros_like(net);
  accumulate_backward(net, cache, upstream, grad);
  return grad;
}

std::vector<std::size_t> mlp_dims(std::size_t input_dim, std::size_t hidden_layers,
                                  std::size_t units) {
  std::vector<std::size_t> dims{input_dim};
  for (std::size_t i = 0; i < hidden_layers; ++i) dims.push_back(units);
  dims.push_back(1);
  return dims;
}

Network init_network(std::span<const std::size_t> dims, std::uint64_t seed) {
  if (dims.size() < 2) raise(Errc::invalid_dims, "dims must list the input width and at least one layer");
  if (std::find(dims.begin(), dims.end(), std::size_t{0}) != dims.end()) {
    raise(Errc::invalid_dims, "all dims must be positive");
  }
  if (dims.back() != 1) raise(Errc::invalid_dims, "the network output must be scalar");

  Rng rng(seed);
  std::vector<DenseLayer> layers;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    DenseLayer layer;
    layer.in_dim = dims[i];
    layer.out_dim = dims[i + 1];
    layer.activation = i + 2 == dims.size() ? Activation::Identity : Activation::ReLU;
    const double bound = std::sqrt(6.0 / static_cast<double>(layer.in_dim));
    layer.weights.resize(layer.in_dim * layer.out_dim);
    for (auto& w : layer.weights) w = rng.uniform(-bound, bound);
    layer.bias.assign(layer.out_dim, 0.0);
    layers.push_back(std::move(layer));
  }
  return Network(std::move(layers));
}

std::vector<double> frobenius_norms(const Network& net) {
  std::vector<double> norms;
  norms.reserve(net.depth());
  for (const auto& l : net.layers()) {
    double sum = 0.0;
    for (double w : l.weights) sum += w * w;
    norms.push_back(std::sqrt(sum));
  }
  return norms;
}

namespace detail {

nlohmann::json network_json(const Network& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : net.layers()) {
    layers.push_back({{"in_dim", l.in_dim},
                      {"out_dim", l.out_dim},
                      {"activation", l.activation == Activation::ReLU ? "relu" : "identity"},
                      {"weights", l.weights},
                      {"bias", l.bias}});
  }
  std::vector<std::size_t> dims{net.input_dim()};
  for (const auto& l : net.layers()) dims.push_back(l.out_dim);
  return {{"format", kNetworkFormat}, {"version", kNetworkVersion}, {"dims", dims}, {"layers", layers}};
}

Network network_from(const nlohmann::json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kNetworkFormat) {
      raise(Errc::parse, "not a robosnn network document");
    }
    if (doc.at("version").get<int>() != kNetworkVersion) {
      raise(Errc::parse, "unsupported network document version");
    }
    std::vector<DenseLayer> layers;
    for (const auto& jl : doc.at("layers")) {
      DenseLayer l;
      l.in_dim = jl.at("in_dim").get<std::size_t>();
      l.out_dim = jl.at("out_dim").get<std::size_t>();
      const auto act = jl.at("activation").get<std::string>();
      if (act == "relu") {
        l.activation = Activation::ReLU;
      } else if (act == "identity") {
        l.activation = Activation::Identity;
      } else {
        raise(Errc::parse, "unknown activation '" + act + "'");
      }
      l.weights = jl.at("weights").get<std::vector<double>>();
      l.bias = jl.at("bias").get<std::vector<double>>();
      layers.push_back(std::move(l));
    }
    return Network(std::move(layers));
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::parse, std::string("malformed network document: ") + e.what());
  }
}

}  // namespace detail

std::string network_to_json(const Network& net) { return detail::network_json(net).dump(2); }

Network network_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::parse, std::string("invalid JSON: ") + e.what());
  }
  return detail::network_from(doc);
}

}  // namespace robosnn
