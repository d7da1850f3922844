#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "robosnn/data.hpp"
#include "robosnn/error.hpp"
#include "test_support.hpp"

using namespace robosnn;
using robosnn::testing::TempDir;
using robosnn::testing::write_file;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::usage;
}

Series ramp(std::size_t n) {
  Series s;
  for (std::size_t i = 1; i <= n; ++i) s.values.push_back(static_cast<double>(i));
  return s;
}

}  // namespace

TEST(Ingest, ThreeRowsWithHeader) {
  TempDir dir;
  write_file(dir / "t.csv", "Date,Temp\n1981-01-01,20.7\n1981-01-02,17.9\n1981-01-03,18.8\n");
  const auto s = ingest_csv(dir / "t.csv");
  EXPECT_EQ(s.values, (std::vector<double>{20.7, 17.9, 18.8}));
  EXPECT_EQ(s.dropped_rows, 0u);
  EXPECT_EQ(s.name, "t");
  EXPECT_EQ(ingest_csv(dir / "t.csv", "Temp").values, s.values);
  EXPECT_EQ(ingest_csv(dir / "t.csv", "1").values, s.values);
}

TEST(Ingest, HeaderlessSingleColumnAndComments) {
  TempDir dir;
  write_file(dir / "v.csv", "# generated\n1.5\n-2\n3e2\n");
  EXPECT_EQ(ingest_csv(dir / "v.csv").values, (std::vector<double>{1.5, -2.0, 300.0}));
}

TEST(Ingest, MissingAndUnparseableValuesAreDropped) {
  TempDir dir;
  std::ostringstream os;
  os << "Date,Value\n";
  for (int i = 0; i < 100; ++i) {
    if (i == 40) {
      os << "\n";
    } else {
      os << "d" << i << "," << i << "\n";
    }
  }
  write_file(dir / "gap.csv", os.str());
  const auto s = ingest_csv(dir / "gap.csv");
  EXPECT_EQ(s.values.size(), 99u);
  EXPECT_EQ(s.dropped_rows, 1u);

  write_file(dir / "bad.csv", "v\n1\n?\n\"3\"\n");
  const auto b = ingest_csv(dir / "bad.csv");
  EXPECT_EQ(b.values, (std::vector<double>{1.0, 3.0}));
  EXPECT_EQ(b.dropped_rows, 1u);
}

TEST(Ingest, Errors) {
  TempDir dir;
  EXPECT_EQ(code_of([&] { ingest_csv(dir / "absent.csv"); }), Errc::io);
  write_file(dir / "t.csv", "Date,Temp\nx,1\ny,2\n");
  EXPECT_EQ(code_of([&] { ingest_csv(dir / "t.csv", "Temperature"); }), Errc::column_missing);
  EXPECT_EQ(code_of([&] { ingest_csv(dir / "t.csv", "5"); }), Errc::column_missing);
  EXPECT_EQ(code_of([&] { ingest_csv(dir / "t.csv", "", 3); }), Errc::series_too_short);
}

TEST(Ingest, WriteReadRoundTrip) {
  TempDir dir;
  Series s;
  s.values = {0.1, 1.0 / 3.0, -7e-12, 12345.678};
  std::ostringstream os;
  write_series_csv(os, s, {"note"});
  EXPECT_EQ(os.str().rfind("# note\nvalue\n", 0), 0u);
  write_file(dir / "r.csv", os.str());
  EXPECT_EQ(ingest_csv(dir / "r.csv").values, s.values);
}

TEST(Contamination, CountBoundsAndDeterminism) {
  const Series clean = synthetic_ar1(1000, 0.8, 1.0, 3);
  const std::size_t region = training_region_length(clean.values.size(), 10);
  EXPECT_EQ(region, 10u + 792u);
  for (double f : {0.0, 0.05, 0.1, 0.2, 0.3, 0.49}) {
    const ContaminationSpec spec{f, 3.0, 5.0, 17};
    const auto idx = outlier_indices(spec, region);
    EXPECT_EQ(idx.size(), static_cast<std::size_t>(std::floor(f * static_cast<double>(region) + 1e-9)));
    EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
    EXPECT_EQ(std::set<std::size_t>(idx.begin(), idx.end()).size(), idx.size());

    const Series dirty = inject_outliers(clean, spec, region);
    EXPECT_EQ(dirty.values, inject_outliers(clean, spec, region).values);

    std::vector<double> train(clean.values.begin(), clean.values.begin() + static_cast<std::ptrdiff_t>(region));
    const double sigma = stddev_of(train);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < clean.values.size(); ++i) {
      const double d = std::fabs(dirty.values[i] - clean.values[i]);
      if (d == 0.0) continue;
      ++changed;
      EXPECT_LT(i, region);
      EXPECT_GE(d, 3.0 * sigma - 1e-9);
      EXPECT_LE(d, 5.0 * sigma + 1e-9);
      EXPECT_TRUE(std::binary_search(idx.begin(), idx.end(), i));
    }
    EXPECT_EQ(changed, idx.size());
  }
}

TEST(Contamination, SeedChangesSelection) {
  const ContaminationSpec a{0.1, 3.0, 5.0, 1};
  const ContaminationSpec b{0.1, 3.0, 5.0, 2};
  EXPECT_NE(outlier_indices(a, 500), outlier_indices(b, 500));
}

TEST(Contamination, BothSignsOccur) {
  const Series clean = synthetic_ar1(2000, 0.5, 1.0, 9);
  const ContaminationSpec spec{0.2, 3.0, 5.0, 4};
  const Series dirty = inject_outliers(clean, spec, 1500);
  int up = 0, down = 0;
  for (std::size_t i = 0; i < clean.values.size(); ++i) {
    up += dirty.values[i] > clean.values[i];
    down += dirty.values[i] < clean.values[i];
  }
  EXPECT_GT(up, 100);
  EXPECT_GT(down, 100);
}

TEST(Contamination, InvalidSpecs) {
  const Series s = ramp(20);
  EXPECT_EQ(code_of([&] { inject_outliers(s, {0.5}, 10); }), Errc::invalid_fraction);
  EXPECT_EQ(code_of([&] { inject_outliers(s, {-0.1}, 10); }), Errc::invalid_fraction);
  EXPECT_EQ(code_of([&] { inject_outliers(s, {0.1, 5.0, 3.0}, 10); }), Errc::invalid_parameter);
  EXPECT_EQ(code_of([&] { inject_outliers(s, {0.1}, 30); }), Errc::invalid_parameter);
}

TEST(Windows, RampExample) {
  const auto d = window_and_split(ramp(10), 3);
  ASSERT_EQ(d.size(), 7u);
  EXPECT_EQ(d.split_index, 5u);
  EXPECT_EQ(d.train_size(), 5u);
  EXPECT_EQ(d.test_size(), 2u);
  EXPECT_EQ(d.train_values, (std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8}));
  EXPECT_DOUBLE_EQ(d.norm_mean, 4.5);
  EXPECT_DOUBLE_EQ(d.norm_std, std::sqrt(5.25));
  for (std::size_t i = 0; i < d.size(); ++i) {
    ASSERT_EQ(d.inputs[i].size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_DOUBLE_EQ(denormalize(d, d.inputs[i][k]), static_cast<double>(i + k + 1));
    }
    EXPECT_DOUBLE_EQ(denormalize(d, d.targets[i]), static_cast<double>(i + 4));
  }
}

TEST(Windows, ChronologicalSplitAndTrainOnlyStatistics) {
  Series s = ramp(50);
  s.values.back() = 1e6;  // a test-region value must not move the statistics
  const auto d = window_and_split(s, 5);
  EXPECT_DOUBLE_EQ(d.norm_mean, mean_of(d.train_values));
  EXPECT_EQ(d.train_values.size(), 5u + d.split_index);
  EXPECT_LT(d.norm_mean, 100.0);
}

TEST(Windows, ConstantSeriesUsesStdFloor) {
  Series s;
  s.values.assign(20, 4.0);
  const auto d = window_and_split(s, 3);
  EXPECT_EQ(d.norm_std, kMinNormStd);
  for (double t : d.targets) EXPECT_EQ(t, 0.0);
}

TEST(Windows, Errors) {
  EXPECT_EQ(code_of([] { window_and_split(ramp(4), 3); }), Errc::series_too_short);
  EXPECT_EQ(code_of([] { window_and_split(ramp(10), 0); }), Errc::invalid_parameter);
  Series bad = ramp(10);
  bad.values[2] = NAN;
  EXPECT_EQ(code_of([&] { window_and_split(bad, 3); }), Errc::non_finite);
}

TEST(Windows, TrainingRegionMatchesWindowedTrainingValues) {
  for (std::size_t n : {12u, 100u, 731u}) {
    for (std::size_t seq : {1u, 3u, 10u}) {
      const auto d = window_and_split(ramp(n), seq);
      EXPECT_EQ(training_region_length(n, seq), d.train_values.size());
    }
  }
}

TEST(Synthetic, Ar1IsDeterministicAndStationaryAroundMean) {
  const auto a = synthetic_ar1(5000, 0.9, 1.0, 1, 10.0);
  EXPECT_EQ(a.values, synthetic_ar1(5000, 0.9, 1.0, 1, 10.0).values);
  EXPECT_NEAR(mean_of(a.values), 10.0, 0.7);
  // Stationary std is sigma / sqrt(1 - phi^2) ~ 2.29.
  EXPECT_NEAR(stddev_of(a.values), 1.0 / std::sqrt(1.0 - 0.81), 0.3);
}
