#include <admsim/error.hpp>
#include <admsim/metrics.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <bit>
#include <cmath>
#include <random>

using namespace admsim;

namespace {

SpikeTrain on_train(std::vector<std::int64_t> ts, std::int64_t duration = 10000) {
  SpikeTrain t;
  t.duration_us = duration;
  for (auto v : ts) {
    t.events.push_back({v, Polarity::on});
  }
  return t;
}

} // namespace

TEST(Match, IdenticalTrains) {
  const auto t = on_train({10, 500, 900});
  for (std::int64_t tol : {0, 1, 500}) {
    const auto r = match_spike_trains(t, t, tol);
    EXPECT_EQ(r.tp, 3u);
    EXPECT_EQ(r.precision, 1.0);
    EXPECT_EQ(r.recall, 1.0);
    EXPECT_EQ(r.f1, 1.0);
  }
}

TEST(Match, EmptyCandidate) {
  const auto r = match_spike_trains(on_train({1, 2, 3, 4, 5}), on_train({}));
  EXPECT_EQ(r.tp, 0u);
  EXPECT_EQ(r.fn_, 5u);
  EXPECT_EQ(r.f1, 0.0);
}

TEST(Match, BothEmptyIsPerfect) {
  const auto r = match_spike_trains(on_train({}), on_train({}));
  EXPECT_EQ(r.f1, 1.0);
}

TEST(Match, WorkedExample) {
  const auto r = match_spike_trains(on_train({1000, 2000, 3000}),
                                    on_train({1200, 2900, 5000}), 500);
  EXPECT_EQ(r.tp, 2u);
  EXPECT_EQ(r.fp, 1u);
  EXPECT_EQ(r.fn_, 1u);
  EXPECT_NEAR(r.f1, 2.0 / 3.0, 1e-15);
  EXPECT_EQ(oracle::optimal_tp(on_train({1000, 2000, 3000}),
                               on_train({1200, 2900, 5000}), 500),
            2u);
}

TEST(Match, NearestFirstWouldLoseAPair) {
  // Candidate 6 is nearer to reference 10 than to 0, but taking 10 leaves
  // candidate 15 with nothing. The matcher must still find both pairs.
  const auto r = match_spike_trains(on_train({0, 10}), on_train({6, 15}), 6);
  EXPECT_EQ(r.tp, 2u);
}

TEST(Match, PolarityStrict) {
  SpikeTrain a, b;
  a.duration_us = b.duration_us = 100;
  a.events = {{10, Polarity::on}};
  b.events = {{10, Polarity::off}};
  const auto r = match_spike_trains(a, b, 50);
  EXPECT_EQ(r.tp, 0u);
  EXPECT_EQ(r.fp, 1u);
  EXPECT_EQ(r.fn_, 1u);
}

TEST(Match, RejectsUnsortedAndNegativeTolerance) {
  SpikeTrain bad = on_train({30, 10});
  EXPECT_THROW(match_spike_trains(bad, on_train({})), ValidationError);
  EXPECT_THROW(match_spike_trains(on_train({}), on_train({}), -1), ValidationError);
}

TEST(Match, JsonKeys) {
  const auto r = match_spike_trains(on_train({1000, 2000, 3000}),
                                    on_train({1200, 2900, 5000}), 500);
  const auto j = nlohmann::json::parse(r.to_json());
  EXPECT_EQ(r.to_json().find('\n'), std::string::npos);
  EXPECT_EQ(j["tp"], 2);
  EXPECT_EQ(j["fp"], 1);
  EXPECT_EQ(j["fn"], 1);
  EXPECT_EQ(j["tolerance_us"], 500);
  EXPECT_TRUE(j.contains("precision") && j.contains("recall") && j.contains("f1"));
}

TEST(MatchProperty, ExhaustiveSmallGridEqualsOptimum) {
  // Every pair of ON subsets of 8 slots with <= 4 events each.
  const int slots = 8;
  std::vector<unsigned> masks;
  for (unsigned m = 0; m < (1u << slots); ++m) {
    if (std::popcount(m) <= 4) {
      masks.push_back(m);
    }
  }
  for (std::int64_t tol : {0, 100, 150, 250}) {
    for (unsigned a : masks) {
      const auto ref = oracle::mask_train(a, slots, 100);
      for (unsigned b : masks) {
        const auto cand = oracle::mask_train(b, slots, 100);
        ASSERT_EQ(match_spike_trains(ref, cand, tol).tp,
                  oracle::optimal_tp(ref, cand, tol))
            << a << " " << b << " tol " << tol;
      }
    }
  }
}

TEST(MatchProperty, RandomInstancesEqualOptimum) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto ref = oracle::random_train(rng, 30, 37, 10);
    const auto cand = oracle::random_train(rng, 30, 37, 10);
    const std::int64_t tol = static_cast<std::int64_t>(rng() % 200);
    ASSERT_EQ(match_spike_trains(ref, cand, tol).tp, oracle::optimal_tp(ref, cand, tol));
  }
}

TEST(MatchProperty, SwapExchangesFpAndFn) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 500; ++trial) {
    const auto a = oracle::random_train(rng, 40, 25, 10);
    const auto b = oracle::random_train(rng, 40, 25, 10);
    const auto ab = match_spike_trains(a, b, 60);
    const auto ba = match_spike_trains(b, a, 60);
    EXPECT_EQ(ab.tp, ba.tp);
    EXPECT_EQ(ab.fp, ba.fn_);
    EXPECT_EQ(ab.fn_, ba.fp);
  }
}

TEST(MatchProperty, F1MonotoneInTolerance) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = oracle::random_train(rng, 50, 20, 15);
    const auto b = oracle::random_train(rng, 50, 20, 15);
    double prev = 2.0;
    for (std::int64_t tol = 400; tol >= 0; tol -= 20) {
      const double f1 = match_spike_trains(a, b, tol).f1;
      ASSERT_LE(f1, prev);
      prev = f1;
    }
  }
}

TEST(Pearson, Examples) {
  const std::vector<double> x = {1, 2, 3}, y = {1, 2, 4};
  EXPECT_NEAR(pearson(x, y), 9.0 / std::sqrt(84.0), 1e-12);
  EXPECT_EQ(pearson(x, x), 1.0);
  const std::vector<double> nx = {-1, -2, -3};
  EXPECT_EQ(pearson(x, nx), -1.0);
  const std::vector<double> c = {2, 2, 2};
  EXPECT_THROW(pearson(x, c), DomainError);
  EXPECT_THROW(pearson(std::vector<double>{1, 2}, x), ValidationError);
}

TEST(Pearson, ShuffledIsUncorrelated) {
  std::mt19937_64 rng(44);
  std::normal_distribution<double> g;
  std::vector<double> x(100000);
  for (auto& v : x) {
    v = g(rng);
  }
  auto y = x;
  std::shuffle(y.begin(), y.end(), rng);
  EXPECT_LT(std::fabs(pearson(x, y)), 0.02);
}

TEST(PearsonProperty, AffineInvarianceAndOracle) {
  std::mt19937_64 rng(45);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + rng() % 500;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = g(rng);
      y[i] = 0.5 * x[i] + g(rng);
    }
    const double r = pearson(x, y);
    EXPECT_NEAR(r, oracle::pearson(x, y), 1e-12);
    const double a = u(rng), b = u(rng) - 5.0;
    std::vector<double> ax(x), neg(x);
    for (std::size_t i = 0; i < n; ++i) {
      ax[i] = a * x[i] + b;
      neg[i] = -a * x[i] + b;
    }
    EXPECT_NEAR(pearson(ax, y), r, 1e-12);
    EXPECT_NEAR(pearson(neg, y), -r, 1e-12);
  }
}

TEST(SpikeRate, Examples) {
  SpikeTrain t;
  t.duration_us = 1000000;
  for (int i = 0; i < 200; ++i) {
    t.events.push_back({i * 5000, Polarity::on});
  }
  EXPECT_EQ(spike_rate(t), 200.0);
  EXPECT_EQ(spike_rate(on_train({}, 1000000)), 0.0);
  EXPECT_EQ(spike_rate(on_train({1, 2, 3}, 1500000)), 2.0);
  EXPECT_THROW(spike_rate(on_train({}, 0)), DomainError);
}

TEST(Energy, Examples) {
  const EnergyModel m;
  EXPECT_NEAR(energy_report(on_train({5}, 1000), m).dynamic_energy_j, 60.7281e-9, 1e-18);
  SpikeTrain t;
  t.duration_us = 1000000;
  for (int i = 0; i < 200; ++i) {
    t.events.push_back({i * 5000, Polarity::off});
  }
  const auto r = energy_report(t, m);
  EXPECT_NEAR(r.avg_power_w, 12.1456e-6, 1e-10);
  EXPECT_NEAR(r.avg_power_w, m.dynamic_power_w, 1e-4 * m.dynamic_power_w);
  const auto z = energy_report(on_train({}, 1000), m);
  EXPECT_EQ(z.dynamic_energy_j, 0.0);
  EXPECT_EQ(z.avg_power_w, 0.0);
  EXPECT_NEAR(m.break_even_rate_hz(), 200.0, 0.1);
  EXPECT_THROW(energy_report(on_train({}, 0), m), DomainError);
}

TEST(EnergyProperty, AdditiveOverDisjointTrains) {
  std::mt19937_64 rng(46);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = oracle::random_train(rng, 100, 10, 30);
    auto b = oracle::random_train(rng, 100, 10, 30);
    SpikeTrain joined = a;
    for (auto e : b.events) {
      e.timestamp_us += a.duration_us;
      joined.events.push_back(e);
    }
    joined.duration_us = a.duration_us + b.duration_us;
    const double ea = energy_report(a).dynamic_energy_j;
    const double eb = energy_report(b).dynamic_energy_j;
    EXPECT_NEAR(energy_report(joined).dynamic_energy_j, ea + eb, 1e-20);
  }
}
