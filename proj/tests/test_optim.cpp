#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <sstream>

#include "robosnn/error.hpp"
#include "robosnn/optim.hpp"
#include "robosnn/rng.hpp"

using namespace robosnn;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

Network scalar_net(double w, double b = 0.0) {
  return Network({DenseLayer{1, 1, {w}, {b}, Activation::Identity}});
}

GradientBuffer scalar_grad(double gw, double gb = 0.0) {
  GradientBuffer g;
  g.layers.push_back({{gw}, {gb}});
  return g;
}

// Reference Adam trajectory for one scalar parameter.
struct AdamOracle {
  Big eta, b1, b2, delta, m = 0, v = 0, theta;
  int t = 0;
  Big step(Big g) {
    ++t;
    m = b1 * m + (1 - b1) * g;
    v = b2 * v + (1 - b2) * g * g;
    const Big m_hat = m / (1 - pow(b1, t));
    const Big v_hat = v / (1 - pow(b2, t));
    theta -= eta * m_hat / (sqrt(v_hat) + delta);
    return theta;
  }
};

WindowedDataset linear_dataset(std::size_t n, double slope, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = rng.uniform(-1.0, 1.0);
    x.push_back({v});
    y.push_back(slope * v);
  }
  return make_dataset(std::move(x), std::move(y), n * 4 / 5);
}

WindowedDataset noisy_dataset(std::size_t n, std::size_t width, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(width);
    double s = 0.0;
    for (auto& v : row) {
      v = rng.normal();
      s += v;
    }
    x.push_back(std::move(row));
    y.push_back(0.3 * s + 0.2 * rng.normal());
  }
  return make_dataset(std::move(x), std::move(y), n * 4 / 5);
}

}  // namespace

TEST(Adam, FirstThreeStepsWithUnitGradient) {
  Network net = scalar_net(0.0);
  AdamState adam(net, AdamConfig{});
  AdamOracle ref{Big("0.001"), Big("0.9"), Big("0.999"), Big("1e-8"), 0, 0, Big(0)};
  for (int t = 1; t <= 3; ++t) {
    adam.step(net, scalar_grad(1.0));
    const double expected = ref.step(Big(1)).convert_to<double>();
    EXPECT_NEAR(net.layers()[0].weights[0], expected, 1e-15) << "t=" << t;
    EXPECT_NEAR(net.layers()[0].weights[0], -0.001 * t, 1e-10);
    EXPECT_EQ(adam.t(), static_cast<std::uint64_t>(t));
  }
  // The bias never saw a gradient.
  EXPECT_EQ(net.layers()[0].bias[0], 0.0);
}

TEST(Adam, FirstStepMovesByEtaForAnyGradient) {
  for (double g : {1e-6, 0.3, -4.0, 250.0}) {
    Network net = scalar_net(1.0);
    AdamState adam(net, AdamConfig{0.01});
    adam.step(net, scalar_grad(g));
    EXPECT_NEAR(net.layers()[0].weights[0], 1.0 - 0.01 * std::copysign(1.0, g) * std::fabs(g) /
                                                     (std::fabs(g) + 1e-8),
                1e-15);
  }
}

TEST(Adam, MatchesOracleOnVaryingGradients) {
  Network net = scalar_net(0.5);
  const AdamConfig cfg{0.02, 0.8, 0.95, 1e-7};
  AdamState adam(net, cfg);
  AdamOracle ref{Big(cfg.eta), Big(cfg.beta1), Big(cfg.beta2), Big(cfg.delta), 0, 0, Big(0.5)};
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const double g = rng.uniform(-3.0, 3.0);
    adam.step(net, scalar_grad(g));
    EXPECT_NEAR(net.layers()[0].weights[0], ref.step(Big(g)).convert_to<double>(), 1e-13);
  }
}

TEST(Adam, ZeroBetasGiveSignDescent) {
  Network net = scalar_net(0.0);
  AdamState adam(net, AdamConfig{0.1, 0.0, 0.0, 1e-8});
  adam.step(net, scalar_grad(2.0));
  EXPECT_NEAR(net.layers()[0].weights[0], -0.1, 1e-8);
  adam.step(net, scalar_grad(-0.5));
  EXPECT_NEAR(net.layers()[0].weights[0], 0.0, 1e-8);
}

TEST(Adam, DescendsOnQuadratic) {
  Network net = scalar_net(1.0);
  AdamState adam(net, AdamConfig{});
  for (int i = 0; i < 100; ++i) adam.step(net, scalar_grad(2.0 * net.layers()[0].weights[0]));
  EXPECT_LT(std::fabs(net.layers()[0].weights[0]), 0.95);
}

TEST(Adam, RejectsBadInput) {
  Network net = scalar_net(1.0);
  AdamState adam(net, AdamConfig{});
  try {
    adam.step(net, scalar_grad(NAN));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::non_finite);
  }
  GradientBuffer wrong;
  try {
    adam.step(net, wrong);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::dimension_mismatch);
  }
  EXPECT_THROW(AdamState(net, AdamConfig{0.0}), Error);
  EXPECT_THROW(AdamState(net, AdamConfig{0.1, 1.0}), Error);
}

TEST(Risk, SquareLossExample) {
  const Network net = scalar_net(0.0);
  const std::vector<std::vector<double>> x{{0.0}, {0.0}};
  const std::vector<double> y{1.0, 3.0};
  EXPECT_EQ(empirical_risk(net, x, y, LossSpec::square()), 5.0);
}

TEST(Risk, L2PenaltyAddsHalfSquaredNorm) {
  const Network net = scalar_net(2.0, 1.0);
  const std::vector<std::vector<double>> x{{1.0}};
  const std::vector<double> y{3.0};
  EXPECT_EQ(squared_norm(net), 5.0);
  EXPECT_DOUBLE_EQ(empirical_risk(net, x, y, LossSpec::square(), 0.1), 0.25);
}

TEST(Risk, RobosRiskStaysBelowLambda) {
  const Network net = scalar_net(0.0);
  std::vector<std::vector<double>> x(100, {0.0});
  std::vector<double> y(100);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = 1e3 * static_cast<double>(i + 1);
  EXPECT_LT(empirical_risk(net, x, y, LossSpec::robos(1.0, 0.4, 0.01)), 0.4);
}

TEST(Risk, Errors) {
  const Network net = scalar_net(1.0);
  const std::vector<std::vector<double>> x{{1.0}};
  const std::vector<double> none;
  const std::vector<double> two{1.0, 2.0};
  try {
    empirical_risk(net, {}, none, LossSpec::square());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::empty_input);
  }
  try {
    empirical_risk(net, x, two, LossSpec::square());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::length_mismatch);
  }
}

TEST(Partition, HoldsOutTrailingTenPercent) {
  const auto data = linear_dataset(125, 1.0, 1);  // 100 training windows
  const auto p = partition(data, 0.1);
  EXPECT_EQ(p.fit_end, 90u);
  EXPECT_EQ(p.val_end, 100u);
  const auto tiny = linear_dataset(5, 1.0, 1);  // 4 training windows
  EXPECT_EQ(partition(tiny, 0.1).fit_end, 3u);
}

TEST(Train, FitsLinearTarget) {
  const auto data = linear_dataset(500, 2.0, 7);
  TrainConfig cfg;
  cfg.max_epochs = 400;
  cfg.patience = 50;
  cfg.batch_size = 16;
  cfg.adam.eta = 0.01;
  const auto res = train(init_network(std::vector<std::size_t>{1, 1}, 1), data, cfg);
  const auto yhat = predict(res.network, data, data.train_size(), data.size());
  std::vector<double> y(data.targets.begin() + static_cast<std::ptrdiff_t>(data.train_size()),
                        data.targets.end());
  double se = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) se += (y[i] - yhat[i]) * (y[i] - yhat[i]);
  EXPECT_LT(std::sqrt(se / static_cast<double>(y.size())), 1e-2);
}

TEST(Train, PatienceOneStopsAtEpochTwoOnFlatValidation) {
  std::vector<std::vector<double>> x(40, {0.0, 0.0});
  std::vector<double> y(40, 0.0);
  const auto data = make_dataset(x, y, 30);
  TrainConfig cfg;
  cfg.patience = 1;
  cfg.batch_size = 4;
  const Network net = init_network(std::vector<std::size_t>{2, 1}, 3);
  const auto res = train(net, data, cfg);
  EXPECT_EQ(res.history.epochs.size(), 2u);
  EXPECT_TRUE(res.history.stopped_early);
  EXPECT_EQ(res.history.best_epoch, 1);
}

TEST(Train, DeterministicForSeed) {
  const auto data = noisy_dataset(300, 4, 2);
  TrainConfig cfg;
  cfg.max_epochs = 15;
  cfg.batch_size = 8;
  cfg.seed = 42;
  cfg.loss = LossSpec::robos(2.0, 0.5, 0.02);
  const auto dims = mlp_dims(4, 2, 8);
  const auto a = train(init_network(dims, 5), data, cfg);
  const auto b = train(init_network(dims, 5), data, cfg);
  EXPECT_TRUE(a.network == b.network);
  EXPECT_EQ(a.history, b.history);
  cfg.seed = 43;
  const auto c = train(init_network(dims, 5), data, cfg);
  EXPECT_FALSE(a.history == c.history);
}

TEST(Train, ReturnsBestValidationCheckpoint) {
  const auto data = noisy_dataset(300, 4, 4);
  TrainConfig cfg;
  cfg.max_epochs = 60;
  cfg.patience = 60;
  cfg.batch_size = 8;
  cfg.adam.eta = 0.05;  // large enough for validation loss to bounce
  const auto res = train(init_network(mlp_dims(4, 2, 16), 1), data, cfg);
  ASSERT_LE(res.history.epochs.size(), 60u);
  const auto p = partition(data, cfg.validation_fraction);
  const std::span<const std::vector<double>> vx(data.inputs.data() + p.fit_end, p.val_end - p.fit_end);
  const std::span<const double> vy(data.targets.data() + p.fit_end, p.val_end - p.fit_end);
  const double best = res.history.epochs[static_cast<std::size_t>(res.history.best_epoch - 1)].val_loss;
  EXPECT_DOUBLE_EQ(empirical_risk(res.network, vx, vy, cfg.loss), best);
  for (const auto& e : res.history.epochs) EXPECT_GE(e.val_loss, best);
}

TEST(Train, EpochCountNeverExceedsMaximum) {
  const auto data = noisy_dataset(200, 3, 9);
  for (int max_epochs : {1, 3, 10}) {
    TrainConfig cfg;
    cfg.max_epochs = max_epochs;
    cfg.batch_size = 16;
    const auto res = train(init_network(mlp_dims(3, 1, 4), 1), data, cfg);
    EXPECT_LE(res.history.epochs.size(), static_cast<std::size_t>(max_epochs));
    EXPECT_GE(res.history.best_epoch, 1);
  }
}

TEST(Train, CostIsLinearInEpochsSamplesAndParameters) {
  const auto data = noisy_dataset(250, 6, 1);  // 200 training windows
  TrainConfig cfg;
  cfg.max_epochs = 4;
  cfg.patience = 100;
  cfg.batch_size = 10;
  const auto p = partition(data, cfg.validation_fraction);
  for (std::size_t units : {4u, 32u}) {
    const Network net = init_network(mlp_dims(6, 2, units), 1);
    instrumentation::reset();
    const auto res = train(net, data, cfg);
    ASSERT_EQ(res.history.epochs.size(), 4u);
    const auto& c = instrumentation::counters();
    EXPECT_EQ(c.loss_evaluations, 4u * p.val_end);
    const double per = static_cast<double>(c.multiply_adds) /
                       (4.0 * static_cast<double>(p.val_end) * static_cast<double>(net.parameter_count()));
    EXPECT_GE(per, 1.0);
    EXPECT_LE(per, 3.0);
  }
}

TEST(Train, ConfigAndDataErrors) {
  const auto data = noisy_dataset(50, 2, 1);
  TrainConfig cfg;
  cfg.batch_size = 1000;
  try {
    train(init_network(mlp_dims(2, 1, 2), 1), data, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::dataset_too_small);
  }
  cfg.batch_size = 4;
  EXPECT_THROW(train(init_network(mlp_dims(3, 1, 2), 1), data, cfg), Error);
  cfg.max_epochs = 0;
  EXPECT_THROW(train(init_network(mlp_dims(2, 1, 2), 1), data, cfg), Error);
}

TEST(Train, DivergenceIsReported) {
  std::vector<std::vector<double>> x(40, {1e300});
  std::vector<double> y(40, 1e300);
  const auto data = make_dataset(x, y, 30);
  TrainConfig cfg;
  cfg.batch_size = 4;
  try {
    train(init_network(std::vector<std::size_t>{1, 1}, 1), data, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::divergence);
  }
}

TEST(History, CsvLayout) {
  TrainingHistory h;
  h.epochs = {{1, 0.5, 0.25}, {2, 0.125, 0.5}};
  h.best_epoch = 1;
  h.stopped_early = true;
  std::ostringstream os;
  write_history_csv(os, h);
  EXPECT_EQ(os.str(), "epoch,train_loss,val_loss,stopped_early\n1,0.5,0.25,0\n2,0.125,0.5,1\n");
}
