#include "robosnn/search.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <atomic>
#include <cmath>
#include <exception>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <thread>

#include "robosnn/error.hpp"
#include "robosnn/rng.hpp"

namespace robosnn {

namespace {

constexpr std::uint64_t kDrawStream = 0x73656172ULL;

// Searches run in unit coordinates; Log dimensions are uniform in log space.
double from_unit(const Range& r, double u) {
  double x = 0.0;
  if (r.scale == Scale::Log) {
    x = std::exp(std::log(r.lo) + u * (std::log(r.hi) - std::log(r.lo)));
  } else {
    x = r.lo + u * (r.hi - r.lo);
  }
  return std::clamp(x, r.lo, r.hi);
}

double to_unit(const Range& r, double x) {
  if (r.scale == Scale::Log) return (std::log(x) - std::log(r.lo)) / (std::log(r.hi) - std::log(r.lo));
  return (x - r.lo) / (r.hi - r.lo);
}

using Unit = std::array<double, 3>;

HyperPoint point_from_unit(const SearchSpace& s, const Unit& u) {
  return {from_unit(s.a, u[0]), from_unit(s.eps, u[1]), from_unit(s.lambda, u[2])};
}

Unit random_unit(Rng& rng) {
  Unit u{};
  for (auto& x : u) x = rng.uniform();
  return u;
}

TrialResult run_trial(const Objective& objective, std::size_t index, const HyperPoint& p,
                      std::uint64_t seed) {
  TrialOutcome outcome;
  try {
    outcome = objective(p, seed);
  } catch (const Error& e) {
    throw Error(e.code(), "trial " + std::to_string(index) + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(Errc::objective_failure, "trial " + std::to_string(index) + ": " + e.what());
  }
  if (!std::isfinite(outcome.val_metric)) {
    raise(Errc::objective_failure, "trial " + std::to_string(index) + " returned a non-finite metric");
  }
  return {index, p, outcome.val_metric, seed, outcome.epochs_run};
}

TrialResult best_of(const std::vector<TrialResult>& trials) {
  // Strict comparison keeps the earliest trial on ties.
  const TrialResult* best = &trials.front();
  for (const auto& t : trials) {
    if (t.val_metric < best->val_metric) best = &t;
  }
  return *best;
}

double kernel_density(const std::vector<double>& centers, double bandwidth, double x) {
  double sum = 0.0;
  for (double c : centers) {
    const double z = (x - c) / bandwidth;
    sum += std::exp(-0.5 * z * z);
  }
  return sum / (static_cast<double>(centers.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
}

void check_args(const SearchSpace& space, std::size_t n_trials, const Objective& objective) {
  space.validate();
  if (n_trials == 0) raise(Errc::invalid_parameter, "n_trials must be at least 1");
  if (!objective) raise(Errc::invalid_parameter, "objective is empty");
}

}  // namespace

void SearchSpace::validate() const {
  for (const Range* r : {&a, &eps, &lambda}) {
    if (!std::isfinite(r->lo) || !std::isfinite(r->hi) || !(r->lo < r->hi)) {
      raise(Errc::invalid_range, "search range needs lo < hi");
    }
    if (r->scale == Scale::Log && !(r->lo > 0.0)) {
      raise(Errc::invalid_range, "log-scaled range needs a positive lower bound");
    }
  }
}

bool contains(const SearchSpace& space, const HyperPoint& p) {
  auto in = [](const Range& r, double x) { return x >= r.lo && x <= r.hi; };
  return in(space.a, p.a) && in(space.eps, p.eps) && in(space.lambda, p.lambda);
}

SearchResult random_search(const SearchSpace& space, std::size_t n_trials, const Objective& objective,
                           std::uint64_t seed, std::size_t jobs) {
  check_args(space, n_trials, objective);

  Rng rng(derive_seed(seed, kDrawStream));
  std::vector<HyperPoint> points;
  points.reserve(n_trials);
  for (std::size_t i = 0; i < n_trials; ++i) points.push_back(point_from_unit(space, random_unit(rng)));

  std::vector<TrialResult> trials(n_trials);
  std::vector<std::exception_ptr> failures(n_trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n_trials; i = next++) {
      try {
        trials[i] = run_trial(objective, i, points[i], seed);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  const std::size_t n_threads = std::clamp<std::size_t>(jobs, 1, n_trials);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return {best_of(trials), std::move(trials)};
}

SearchResult tpe_search(const SearchSpace& space, std::size_t n_trials, const Objective& objective,
                        std::uint64_t seed, double gamma) {
  check_args(space, n_trials, objective);
  if (n_trials < kTpeWarmup) {
    raise(Errc::invalid_parameter, "TPE needs at least " + std::to_string(kTpeWarmup) + " trials");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) raise(Errc::invalid_parameter, "gamma must lie in (0, 1)");

  Rng rng(derive_seed(seed, kDrawStream));
  std::vector<TrialResult> trials;
  std::vector<Unit> units;
  trials.reserve(n_trials);

  for (std::size_t i = 0; i < n_trials; ++i) {
    Unit u{};
    if (i < kTpeWarmup) {
      u = random_unit(rng);
    } else {
      // Rank history; the best gamma-fraction forms l(x), the rest g(x).
      std::vector<std::size_t> order(trials.size());
      for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
      std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        return trials[x].val_metric < trials[y].val_metric;
      });
      const auto n_good = std::clamp<std::size_t>(
          static_cast<std::size_t>(std::ceil(gamma * static_cast<double>(order.size()))), 1,
          order.size() - 1);

      std::array<std::vector<double>, 3> good, bad;
      for (std::size_t k = 0; k < order.size(); ++k) {
        for (std::size_t d = 0; d < 3; ++d) {
          (k < n_good ? good : bad)[d].push_back(units[order[k]][d]);
        }
      }
      const double bw_good = 1.0 / std::sqrt(static_cast<double>(n_good));
      const double bw_bad = 1.0 / std::sqrt(static_cast<double>(order.size() - n_good));

      double best_score = -std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < kTpeCandidates; ++c) {
        Unit cand{};
        double score = 0.0;
        for (std::size_t d = 0; d < 3; ++d) {
          const double center = good[d][rng.index(n_good)];
          cand[d] = std::clamp(center + bw_good * rng.normal(), 0.0, 1.0);
          const double l = kernel_density(good[d], bw_good, cand[d]);
          const double g = kernel_density(bad[d], bw_bad, cand[d]);
          score += std::log(l + 1e-300) - std::log(g + 1e-300);
        }
        if (score > best_score) {
          best_score = score;
          u = cand;
        }
      }
    }
    HyperPoint p = point_from_unit(space, u);
    // Record the coordinates of the clamped point actually evaluated.
    units.push_back({to_unit(space.a, p.a), to_unit(space.eps, p.eps), to_unit(space.lambda, p.lambda)});
    trials.push_back(run_trial(objective, i, p, seed));
  }
  return {best_of(trials), std::move(trials)};
}

void write_trials_csv(std::ostream& out, const std::vector<TrialResult>& trials) {
  out << "trial,a,eps,lambda,val_mae,seed,epochs\n" << std::setprecision(17);
  for (const auto& t : trials) {
    out << t.trial << ',' << t.params.a << ',' << t.params.eps << ',' << t.params.lambda << ','
        << t.val_metric << ',' << t.seed << ',' << t.epochs_run << '\n';
  }
}

}  // namespace robosnn
