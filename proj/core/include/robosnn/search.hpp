#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace robosnn {

enum class Scale { Linear, Log };

struct Range {
  double lo = 0.0;
  double hi = 1.0;
  Scale scale = Scale::Linear;
};

/// Box over the RoBoS loss parameters (a, eps, lambda).
struct SearchSpace {
  Range a{1.0, 10.0, Scale::Linear};
  Range eps{0.018315638888734179, 0.05, Scale::Log};  // (e^-4, 0.05)
  Range lambda{0.1, 1.0, Scale::Linear};

  void validate() const;
};

struct HyperPoint {
  double a = 1.0;
  double eps = 0.01;
  double lambda = 1.0;

  bool operator==(const HyperPoint&) const = default;
};

bool contains(const SearchSpace& space, const HyperPoint& p);

struct TrialOutcome {
  double val_metric = 0.0;
  int epochs_run = 0;
};

/// Must be a deterministic function of (params, seed).
using Objective = std::function<TrialOutcome(const HyperPoint&, std::uint64_t seed)>;

struct TrialResult {
  std::size_t trial = 0;
  HyperPoint params;
  double val_metric = 0.0;
  std::uint64_t seed = 0;
  int epochs_run = 0;

  bool operator==(const TrialResult&) const = default;
};

struct SearchResult {
  TrialResult best;
  std::vector<TrialResult> trials;
};

/// Seeded uniform draws (log-uniform on Log dimensions). The best trial is the
/// argmin of val_metric with ties going to the earliest trial. Trials are
/// independent and run on up to `jobs` threads; results are ordered by index.
SearchResult random_search(const SearchSpace& space, std::size_t n_trials, const Objective& objective,
                           std::uint64_t seed, std::size_t jobs = 1);

inline constexpr std::size_t kTpeWarmup = 10;
inline constexpr std::size_t kTpeCandidates = 24;

/// Univariate-product Tree-structured Parzen Estimator. The first kTpeWarmup
/// trials are the same draws random_search makes for `seed`.
SearchResult tpe_search(const SearchSpace& space, std::size_t n_trials, const Objective& objective,
                        std::uint64_t seed, double gamma = 0.25);

/// trial,a,eps,lambda,val_mae,seed,epochs
void write_trials_csv(std::ostream& out, const std::vector<TrialResult>& trials);

}  // namespace robosnn
