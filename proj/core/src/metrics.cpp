#include "robosnn/metrics.hpp"

#include <cmath>
#include <json.hpp>
#include <sstream>

#include "robosnn/error.hpp"

namespace robosnn {

namespace {

void check_pair(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size()) {
    raise(Errc::length_mismatch, "actual and forecast lengths differ (" + std::to_string(y.size()) +
                                     " vs " + std::to_string(yhat.size()) + ")");
  }
  if (y.empty()) raise(Errc::empty_input, "metric over an empty sample");
}

}  // namespace

double mae(std::span<const double> y, std::span<const double> yhat) {
  check_pair(y, yhat);
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) sum += std::fabs(y[i] - yhat[i]);
  return sum / static_cast<double>(y.size());
}

double rmse(std::span<const double> y, std::span<const double> yhat) {
  check_pair(y, yhat);
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double e = y[i] - yhat[i];
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(y.size()));
}

double mase(std::span<const double> y_test, std::span<const double> yhat_test,
            std::span<const double> y_train) {
  if (y_train.size() < 2) raise(Errc::empty_input, "MASE needs at least two training values");
  double scale = 0.0;
  for (std::size_t t = 1; t < y_train.size(); ++t) scale += std::fabs(y_train[t] - y_train[t - 1]);
  scale /= static_cast<double>(y_train.size() - 1);
  if (scale == 0.0) raise(Errc::constant_series, "naive in-sample MAE is zero");
  return mae(y_test, yhat_test) / scale;
}

MetricReport evaluate(std::span<const double> y_test, std::span<const double> yhat_test,
                      std::span<const double> y_train) {
  return {mae(y_test, yhat_test), rmse(y_test, yhat_test), mase(y_test, yhat_test, y_train),
          y_test.size()};
}

std::string to_json(const MetricReport& report) {
  const nlohmann::json j{{"mae", report.mae},
                         {"rmse", report.rmse},
                         {"mase", report.mase},
                         {"n_test", report.n_test}};
  return j.dump(2);
}

std::string to_csv_row(const MetricReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << report.mae << ',' << report.rmse << ',' << report.mase << ',' << report.n_test;
  return os.str();
}

}  // namespace robosnn
