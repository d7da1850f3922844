#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace robosnn {

/// Forecast accuracy in original units.
struct MetricReport {
  double mae = 0.0;
  double rmse = 0.0;
  double mase = 0.0;
  std::size_t n_test = 0;
};

double mae(std::span<const double> y, std::span<const double> yhat);
double rmse(std::span<const double> y, std::span<const double> yhat);

/// Test MAE scaled by the in-sample MAE of the lag-1 naive forecast on y_train.
double mase(std::span<const double> y_test, std::span<const double> yhat_test,
            std::span<const double> y_train);

MetricReport evaluate(std::span<const double> y_test, std::span<const double> yhat_test,
                      std::span<const double> y_train);

std::string to_json(const MetricReport& report);
inline constexpr const char* kMetricCsvHeader = "mae,rmse,mase,n_test";
std::string to_csv_row(const MetricReport& report);

}  // namespace robosnn
