#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <sstream>

#include "robosnn/error.hpp"
#include "robosnn/search.hpp"

using namespace robosnn;

namespace {

TrialOutcome quadratic(const HyperPoint& p, std::uint64_t) {
  return {(p.a - 2.0) * (p.a - 2.0) + p.eps + p.lambda, 1};
}

}  // namespace

TEST(RandomSearch, FindsQuadraticMinimum) {
  const SearchSpace space;
  int passes = 0;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    const auto res = random_search(space, 500, quadratic, rep);
    passes += std::fabs(res.best.params.a - 2.0) < 0.5;
  }
  EXPECT_GE(passes, 9);
}

TEST(RandomSearch, SingleTrial) {
  const auto res = random_search(SearchSpace{}, 1, quadratic, 3);
  ASSERT_EQ(res.trials.size(), 1u);
  EXPECT_EQ(res.best, res.trials[0]);
  EXPECT_EQ(res.best.trial, 0u);
}

TEST(RandomSearch, DeterministicAndIndependentOfJobs) {
  const auto a = random_search(SearchSpace{}, 40, quadratic, 11, 1);
  const auto b = random_search(SearchSpace{}, 40, quadratic, 11, 4);
  EXPECT_EQ(a.trials, b.trials);
  EXPECT_EQ(a.best, b.best);
  const auto c = random_search(SearchSpace{}, 40, quadratic, 12, 1);
  EXPECT_NE(a.trials, c.trials);
}

TEST(RandomSearch, TiesGoToEarliestTrial) {
  const auto res = random_search(SearchSpace{}, 20, [](const HyperPoint&, std::uint64_t) {
    return TrialOutcome{1.0, 1};
  }, 5);
  EXPECT_EQ(res.best.trial, 0u);
}

TEST(RandomSearch, EpsIsLogUniform) {
  const SearchSpace space;
  const auto res = random_search(space, 4000, quadratic, 2);
  const double mid = std::sqrt(space.eps.lo * space.eps.hi);
  int below = 0;
  for (const auto& t : res.trials) below += t.params.eps < mid;
  EXPECT_NEAR(below / 4000.0, 0.5, 0.03);
}

TEST(RandomSearch, ObjectiveErrorsCarryTrialIndex) {
  auto failing = [](const HyperPoint&, std::uint64_t seed) -> TrialOutcome {
    (void)seed;
    raise(Errc::divergence, "boom");
  };
  try {
    random_search(SearchSpace{}, 3, failing, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::divergence);
    EXPECT_NE(std::string(e.what()).find("trial 0"), std::string::npos);
  }
  std::atomic<int> calls{0};
  auto nan_at_two = [&](const HyperPoint& p, std::uint64_t) {
    return TrialOutcome{calls++ == 2 ? NAN : p.a, 1};
  };
  try {
    random_search(SearchSpace{}, 5, nan_at_two, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::objective_failure);
    EXPECT_NE(std::string(e.what()).find("trial 2"), std::string::npos);
  }
}

TEST(RandomSearch, InvalidArguments) {
  EXPECT_THROW(random_search(SearchSpace{}, 0, quadratic, 1), Error);
  SearchSpace bad;
  bad.a = {5.0, 1.0, Scale::Linear};
  EXPECT_THROW(random_search(bad, 3, quadratic, 1), Error);
}

TEST(Tpe, WarmupMatchesRandomSearch) {
  for (std::uint64_t seed : {0u, 7u, 99u}) {
    const auto r = random_search(SearchSpace{}, kTpeWarmup, quadratic, seed);
    const auto t = tpe_search(SearchSpace{}, 30, quadratic, seed);
    ASSERT_EQ(t.trials.size(), 30u);
    for (std::size_t i = 0; i < kTpeWarmup; ++i) EXPECT_EQ(t.trials[i], r.trials[i]);
  }
}

TEST(Tpe, BeatsRandomSearchOnQuadratic) {
  int wins = 0;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    const double r = random_search(SearchSpace{}, 100, quadratic, rep).best.val_metric;
    const double t = tpe_search(SearchSpace{}, 100, quadratic, rep).best.val_metric;
    wins += t <= r;
  }
  EXPECT_GE(wins, 7);
}

TEST(Tpe, Deterministic) {
  const auto a = tpe_search(SearchSpace{}, 40, quadratic, 3);
  const auto b = tpe_search(SearchSpace{}, 40, quadratic, 3);
  EXPECT_EQ(a.trials, b.trials);
}

TEST(Tpe, RequiresWarmup) {
  EXPECT_THROW(tpe_search(SearchSpace{}, kTpeWarmup - 1, quadratic, 1), Error);
  EXPECT_THROW(tpe_search(SearchSpace{}, 20, quadratic, 1, 1.0), Error);
}

TEST(SearchProperties, AllProposalsInsideSpaceAndRunningBestMonotone) {
  SearchSpace narrow;
  narrow.a = {2.0, 2.0 + 1e-12, Scale::Linear};
  narrow.eps = {0.03, 0.03 * (1 + 1e-12), Scale::Log};
  for (const SearchSpace& space : {SearchSpace{}, narrow}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      for (const auto& res : {random_search(space, 60, quadratic, seed), tpe_search(space, 60, quadratic, seed)}) {
        double running = INFINITY;
        double prev = INFINITY;
        for (const auto& t : res.trials) {
          EXPECT_TRUE(contains(space, t.params));
          running = std::min(running, t.val_metric);
          EXPECT_LE(running, prev);
          prev = running;
        }
        EXPECT_EQ(res.best.val_metric, running);
      }
    }
  }
}

TEST(SearchLog, CsvHeader) {
  std::ostringstream os;
  write_trials_csv(os, random_search(SearchSpace{}, 2, quadratic, 1).trials);
  EXPECT_EQ(os.str().rfind("trial,a,eps,lambda,val_mae,seed,epochs\n0,", 0), 0u);
}
