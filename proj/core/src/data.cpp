#include "robosnn/data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <optional>
#include <ostream>

#include "robosnn/error.hpp"
#include "robosnn/rng.hpp"

namespace robosnn {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == ',' && !quoted) {
      fields.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  fields.push_back(trim(line.substr(start)));
  return fields;
}

bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  const std::string s(text);
  try {
    std::size_t used = 0;
    out = std::stod(s, &used);
    return used == s.size() && std::isfinite(out);
  } catch (const std::exception&) {
    return false;
  }
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  });
}

std::size_t floor_fraction(double frac, std::size_t n) {
  // Small slack so that e.g. 0.8 * 10 is not truncated to 7.
  return static_cast<std::size_t>(std::floor(frac * static_cast<double>(n) + 1e-9));
}

}  // namespace

Series ingest_csv(const std::filesystem::path& path, std::string_view value_column,
                  std::size_t min_rows) {
  std::ifstream in(path);
  if (!in) raise(Errc::io, "cannot open '" + path.string() + "'");

  Series series;
  series.name = path.stem().string();

  std::optional<std::size_t> column;
  if (all_digits(value_column)) column = std::stoul(std::string(value_column));

  bool first_row = true;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string_view view = trim(line);
    if (!view.empty() && view.front() == '#') continue;

    if (view.empty()) {
      if (!first_row) ++series.dropped_rows;
      continue;
    }
    const auto fields = split_fields(line);

    if (first_row) {
      first_row = false;
      if (!value_column.empty() && !column) {
        // Named column: the first row must be a header.
        const auto it = std::find(fields.begin(), fields.end(), value_column);
        if (it == fields.end()) {
          raise(Errc::column_missing,
                "column '" + std::string(value_column) + "' not found in " + path.string());
        }
        column = static_cast<std::size_t>(it - fields.begin());
        continue;
      }
      if (!column) column = fields.size() - 1;
      if (*column >= fields.size()) {
        raise(Errc::column_missing, "column index " + std::to_string(*column) +
                                        " out of range in " + path.string());
      }
      double probe = 0.0;
      if (!parse_double(fields[*column], probe)) continue;  // header row
    }

    double value = 0.0;
    if (*column < fields.size() && parse_double(fields[*column], value)) {
      series.values.push_back(value);
    } else {
      ++series.dropped_rows;
    }
  }

  if (first_row && !value_column.empty() && !column) {
    raise(Errc::column_missing, "column '" + std::string(value_column) + "' not found (empty file)");
  }
  if (series.values.size() < min_rows) {
    raise(Errc::series_too_short, path.string() + " has " + std::to_string(series.values.size()) +
                                      " usable rows, need " + std::to_string(min_rows));
  }
  return series;
}

void write_series_csv(std::ostream& out, const Series& series,
                      const std::vector<std::string>& comment_lines) {
  for (const auto& c : comment_lines) out << "# " << c << '\n';
  out << "value\n" << std::setprecision(17);
  for (double v : series.values) out << v << '\n';
}

void ContaminationSpec::validate() const {
  if (!std::isfinite(fraction) || fraction < 0.0 || fraction >= 0.5) {
    raise(Errc::invalid_fraction, "contamination fraction must lie in [0, 0.5)");
  }
  if (!std::isfinite(magnitude_lo) || !std::isfinite(magnitude_hi) || magnitude_lo <= 0.0 ||
      magnitude_lo > magnitude_hi) {
    raise(Errc::invalid_parameter, "outlier magnitudes require 0 < lo <= hi");
  }
}

std::size_t training_region_length(std::size_t n_values, std::size_t seq_size, double train_frac) {
  if (n_values <= seq_size) return n_values;
  return seq_size + floor_fraction(train_frac, n_values - seq_size);
}

std::vector<std::size_t> outlier_indices(const ContaminationSpec& spec, std::size_t train_region) {
  spec.validate();
  const std::size_t count = floor_fraction(spec.fraction, train_region);
  std::vector<std::size_t> all(train_region);
  std::iota(all.begin(), all.end(), std::size_t{0});
  Rng rng(derive_seed(spec.seed, 0x0u));
  // Partial Fisher-Yates: the first `count` slots become a uniform sample.
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(all[i], all[i + rng.index(train_region - i)]);
  }
  all.resize(count);
  std::sort(all.begin(), all.end());
  return all;
}

Series inject_outliers(const Series& series, const ContaminationSpec& spec,
                       std::size_t train_region) {
  spec.validate();
  if (train_region > series.values.size()) {
    raise(Errc::invalid_parameter, "training region exceeds series length");
  }
  Series out = series;
  if (spec.fraction == 0.0 || train_region == 0) return out;

  const std::vector<double> clean_train(series.values.begin(),
                                        series.values.begin() + static_cast<std::ptrdiff_t>(train_region));
  const double sigma = stddev_of(clean_train);

  const std::vector<std::size_t> idx = outlier_indices(spec, train_region);
  Rng rng(derive_seed(spec.seed, 0x1u));
  for (std::size_t i : idx) {
    const double sign = rng.coin() ? 1.0 : -1.0;
    const double k = rng.uniform(spec.magnitude_lo, spec.magnitude_hi);
    out.values[i] += sign * k * sigma;
  }
  return out;
}

WindowedDataset window_and_split(const Series& series, std::size_t seq_size, double train_frac) {
  if (seq_size == 0) raise(Errc::invalid_parameter, "seq_size must be positive");
  if (!(train_frac > 0.0 && train_frac < 1.0)) {
    raise(Errc::invalid_parameter, "train fraction must lie in (0, 1)");
  }
  const auto& v = series.values;
  if (v.size() <= seq_size + 1) {
    raise(Errc::series_too_short, "series of length " + std::to_string(v.size()) +
                                      " is too short for seq_size " + std::to_string(seq_size));
  }
  for (double x : v) {
    if (!std::isfinite(x)) raise(Errc::non_finite, "series contains non-finite values");
  }

  const std::size_t n_windows = v.size() - seq_size;
  const std::size_t split = floor_fraction(train_frac, n_windows);
  if (split == 0 || split == n_windows) {
    raise(Errc::series_too_short, "split leaves an empty train or test set");
  }

  WindowedDataset d;
  d.seq_size = seq_size;
  d.split_index = split;
  d.train_values.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(seq_size + split));
  d.norm_mean = mean_of(d.train_values);
  d.norm_std = std::max(stddev_of(d.train_values), kMinNormStd);

  std::vector<double> z(v.size());
  std::transform(v.begin(), v.end(), z.begin(), [&](double x) { return d.normalize(x); });

  d.inputs.reserve(n_windows);
  d.targets.reserve(n_windows);
  for (std::size_t i = 0; i < n_windows; ++i) {
    d.inputs.emplace_back(z.begin() + static_cast<std::ptrdiff_t>(i),
                          z.begin() + static_cast<std::ptrdiff_t>(i + seq_size));
    d.targets.push_back(z[i + seq_size]);
  }
  return d;
}

WindowedDataset make_dataset(std::vector<std::vector<double>> inputs, std::vector<double> targets,
                             std::size_t split_index, double norm_mean, double norm_std) {
  if (inputs.size() != targets.size()) raise(Errc::length_mismatch, "inputs and targets differ in length");
  if (inputs.empty()) raise(Errc::empty_input, "dataset is empty");
  if (split_index == 0 || split_index > inputs.size()) {
    raise(Errc::invalid_parameter, "split index out of range");
  }
  if (!(norm_std > 0.0) || !std::isfinite(norm_mean)) {
    raise(Errc::invalid_parameter, "normalization statistics are invalid");
  }
  const std::size_t width = inputs.front().size();
  for (const auto& x : inputs) {
    if (x.size() != width) raise(Errc::dimension_mismatch, "inputs have different widths");
  }
  WindowedDataset d;
  d.seq_size = width;
  d.inputs = std::move(inputs);
  d.targets = std::move(targets);
  d.split_index = split_index;
  d.norm_mean = norm_mean;
  d.norm_std = norm_std;
  d.train_values.reserve(split_index);
  for (std::size_t i = 0; i < split_index; ++i) d.train_values.push_back(denormalize(d, d.targets[i]));
  return d;
}

double denormalize(const WindowedDataset& data, double yhat_normalized) {
  return yhat_normalized * data.norm_std + data.norm_mean;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size()));
}

Series synthetic_ar1(std::size_t n, double phi, double sigma, std::uint64_t seed, double mean) {
  Series s;
  s.name = "ar1";
  s.values.reserve(n);
  Rng rng(seed);
  double x = mean;
  for (std::size_t i = 0; i < n; ++i) {
    x = mean + phi * (x - mean) + sigma * rng.normal();
    s.values.push_back(x);
  }
  return s;
}

}  // namespace robosnn
