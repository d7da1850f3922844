#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace robosnn {

struct Series {
  std::string name;
  std::vector<double> values;
  /// Rows skipped during ingestion because the value was missing or unparseable.
  std::size_t dropped_rows = 0;
};

/// Reads a single-column or (timestamp, value) CSV. A header row is detected
/// when the first non-comment row has a non-numeric value field. Lines starting
/// with '#' are skipped. `value_column` is a header name or a zero-based index;
/// empty selects the last column. Throws series_too_short when fewer than
/// `min_rows` usable values remain.
Series ingest_csv(const std::filesystem::path& path, std::string_view value_column = {},
                  std::size_t min_rows = 0);

/// Writes "value" CSV (one column, header), optionally preceded by '#' comment lines.
void write_series_csv(std::ostream& out, const Series& series,
                      const std::vector<std::string>& comment_lines = {});

/// Additive, sign-symmetric outliers. Magnitudes are in units of the clean
/// training-region standard deviation.
struct ContaminationSpec {
  double fraction = 0.0;
  double magnitude_lo = 3.0;
  double magnitude_hi = 5.0;
  std::uint64_t seed = 0;

  /// fraction in [0, 0.5); 0 < magnitude_lo <= magnitude_hi.
  void validate() const;
};

/// Number of leading series values that belong to training windows (inputs or
/// targets) under the chronological split. Values after this index are test
/// targets and are never contaminated.
std::size_t training_region_length(std::size_t n_values, std::size_t seq_size,
                                   double train_frac = 0.8);

/// Picks floor(fraction * train_region) distinct indices in [0, train_region)
/// and shifts each by s * k * sigma, s = +-1, k ~ U[magnitude_lo, magnitude_hi].
Series inject_outliers(const Series& series, const ContaminationSpec& spec,
                       std::size_t train_region);

/// Indices that inject_outliers modifies for the same arguments, sorted.
std::vector<std::size_t> outlier_indices(const ContaminationSpec& spec, std::size_t train_region);

/// Sliding windows over a z-scored series with a chronological train/test split.
struct WindowedDataset {
  std::size_t seq_size = 0;
  std::vector<std::vector<double>> inputs;  ///< normalized values[i, i + seq_size)
  std::vector<double> targets;              ///< normalized values[i + seq_size]
  std::size_t split_index = 0;              ///< windows [0, split_index) are training
  double norm_mean = 0.0;
  double norm_std = 1.0;
  /// Raw (unnormalized) values of the training region; used as MASE scale.
  std::vector<double> train_values;

  std::size_t size() const { return targets.size(); }
  std::size_t train_size() const { return split_index; }
  std::size_t test_size() const { return targets.size() - split_index; }

  double normalize(double v) const { return (v - norm_mean) / norm_std; }
};

inline constexpr double kMinNormStd = 1e-8;

/// Builds len - seq_size windows; split_index = floor(train_frac * windows).
/// Normalization statistics come from the training region only.
WindowedDataset window_and_split(const Series& series, std::size_t seq_size,
                                 double train_frac = 0.8);

/// Builds a dataset from explicit samples (already in model units).
WindowedDataset make_dataset(std::vector<std::vector<double>> inputs, std::vector<double> targets,
                             std::size_t split_index, double norm_mean = 0.0,
                             double norm_std = 1.0);

double denormalize(const WindowedDataset& data, double yhat_normalized);

double mean_of(const std::vector<double>& v);
/// Population standard deviation.
double stddev_of(const std::vector<double>& v);

/// x_t = mean + phi (x_{t-1} - mean) + sigma * N(0, 1), started from the mean.
Series synthetic_ar1(std::size_t n, double phi, double sigma, std::uint64_t seed,
                     double mean = 0.0);

}  // namespace robosnn
