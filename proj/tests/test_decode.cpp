#include <admsim/decode.hpp>
#include <admsim/error.hpp>
#include <admsim/experiments.hpp>

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace admsim;

namespace {

SpikeTrain on_train(std::vector<std::int64_t> ts, std::int64_t duration) {
  SpikeTrain t;
  t.duration_us = duration;
  for (auto v : ts) {
    t.events.push_back({v, Polarity::on});
  }
  return t;
}

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) {
      m(i, j) = g(rng);
    }
  }
  return m;
}

double training_sse(const LinearReadout& r, const Eigen::MatrixXd& f,
                    const Eigen::MatrixXd& y) {
  return (r.predict(f) - y).squaredNorm();
}

} // namespace

TEST(BinSpikes, HalfOpenBins) {
  const auto c = bin_spikes(on_train({500, 1500, 1700}, 2000), 1000, 2000);
  ASSERT_EQ(c.bins(), 2);
  ASSERT_EQ(c.counts.cols(), 2);
  EXPECT_EQ(c.counts(0, 1), 1.0);
  EXPECT_EQ(c.counts(1, 1), 2.0);
  EXPECT_EQ(c.counts.col(0).sum(), 0.0); // OFF column
  const auto edge = bin_spikes(on_train({1000}, 2000), 1000, 2000);
  EXPECT_EQ(edge.counts(0, 1), 0.0);
  EXPECT_EQ(edge.counts(1, 1), 1.0);
  EXPECT_EQ(bin_spikes(on_train({}, 5000), 1000, 5000).counts.sum(), 0.0);
  EXPECT_THROW(bin_spikes(on_train({}, 5000), 0, 5000), ConfigError);
  EXPECT_THROW(bin_spikes(on_train({}, 5000), 1000, 500), ConfigError);
}

TEST(BinSpikes, StreamColumnsAndConservation) {
  AerStream s;
  s.events = {{10, 0, Polarity::off}, {20, 2, Polarity::on}, {1500, 1, Polarity::on}};
  const auto c = bin_spikes(s, 3, 1000, 2000);
  ASSERT_EQ(c.counts.cols(), 6);
  EXPECT_EQ(c.counts(0, 0), 1.0);
  EXPECT_EQ(c.counts(0, 5), 1.0);
  EXPECT_EQ(c.counts(1, 3), 1.0);
  EXPECT_EQ(c.counts.sum(), 3.0);
  EXPECT_THROW(bin_spikes(s, 2, 1000, 2000), ValidationError);

  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 30; ++trial) {
    const auto t = oracle::random_train(rng, 500, 20, 200);
    const auto b = bin_spikes(t, 20 + static_cast<std::int64_t>(rng() % 300), t.duration_us);
    // events past the last whole bin are dropped; the rest are conserved
    std::size_t inside = 0;
    for (const auto& e : t.events) {
      inside += e.timestamp_us < b.bins() * b.bin_width_us ? 1 : 0;
    }
    EXPECT_EQ(b.counts.sum(), static_cast<double>(inside));
  }
}

TEST(LeakyFeatures, ImpulseResponse) {
  BinnedCounts c;
  c.bin_width_us = 20000;
  c.counts = Eigen::MatrixXd::Zero(10, 2);
  c.counts(0, 1) = 1.0;
  const auto y = leaky_features(c, 100000);
  const double alpha = std::exp(-0.2);
  for (Eigen::Index k = 0; k < 10; ++k) {
    EXPECT_NEAR(y(k, 1), std::pow(alpha, static_cast<double>(k)), 1e-14);
    EXPECT_EQ(y(k, 0), 0.0);
  }
  // tau far below the bin width: raw counts
  c.counts(3, 0) = 4.0;
  const auto raw = leaky_features(c, 1);
  EXPECT_TRUE(raw == c.counts);
  EXPECT_THROW(leaky_features(c, 0), ConfigError);
}

TEST(LeakyFeaturesProperty, Linear) {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 20; ++trial) {
    BinnedCounts a, b, m;
    a.bin_width_us = b.bin_width_us = m.bin_width_us = 20000;
    a.counts = random_matrix(rng, 50, 4).cwiseAbs();
    b.counts = random_matrix(rng, 50, 4).cwiseAbs();
    m.counts = 2.0 * a.counts + 3.0 * b.counts;
    const auto lhs = leaky_features(m, 100000);
    const Eigen::MatrixXd rhs = 2.0 * leaky_features(a, 100000) + 3.0 * leaky_features(b, 100000);
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(FitReadout, HandSolvedSystem) {
  Eigen::MatrixXd f(3, 2), y(3, 2);
  f << 1, 0, 0, 1, 1, 1;
  y << 1, 0, 2, 0, 4, 1;
  const auto r0 = fit_readout(f, y, 0.0);
  EXPECT_NEAR(r0.weights(0, 0), 2.0, 1e-9);
  EXPECT_NEAR(r0.weights(1, 0), 3.0, 1e-9);
  EXPECT_NEAR(r0.bias(0), -1.0, 1e-9);
  EXPECT_NEAR(r0.weights(0, 1), 1.0, 1e-9);
  EXPECT_NEAR(r0.weights(1, 1), 1.0, 1e-9);
  EXPECT_NEAR(r0.bias(1), -1.0, 1e-9);
  // lambda = 1, bias unpenalized: w = (3/8, 7/8), b = 3/2 for the x axis.
  const auto r1 = fit_readout(f, y, 1.0);
  EXPECT_NEAR(r1.weights(0, 0), 3.0 / 8.0, 1e-9);
  EXPECT_NEAR(r1.weights(1, 0), 7.0 / 8.0, 1e-9);
  EXPECT_NEAR(r1.bias(0), 1.5, 1e-9);
}

TEST(FitReadout, ExactLinearRecovery) {
  std::mt19937_64 rng(63);
  const auto f = random_matrix(rng, 200, 6);
  const auto w = random_matrix(rng, 6, 2);
  Eigen::MatrixXd y = f * w;
  y.col(0).array() += 0.3;
  const auto r = fit_readout(f, y, 0.0);
  const auto s = evaluate_decoding(r, f, y);
  EXPECT_NEAR(s.rho_x, 1.0, 1e-12);
  EXPECT_NEAR(s.rho_y, 1.0, 1e-12);
  EXPECT_NEAR(s.rho_avg, 1.0, 1e-12);
}

TEST(FitReadout, RidgeLimit) {
  std::mt19937_64 rng(64);
  const auto f = random_matrix(rng, 100, 4);
  const auto y = random_matrix(rng, 100, 2);
  const auto r = fit_readout(f, y, 1e12);
  EXPECT_LT(r.weights.cwiseAbs().maxCoeff(), 1e-9);
  const Eigen::RowVector2d mean = y.colwise().mean();
  EXPECT_NEAR(r.bias(0), mean(0), 1e-9);
  EXPECT_NEAR(r.bias(1), mean(1), 1e-9);
}

TEST(FitReadout, SingularAtZeroLambda) {
  Eigen::MatrixXd f(5, 2), y = Eigen::MatrixXd::Zero(5, 2);
  f << 1, 2, 2, 4, 3, 6, 4, 8, 5, 10; // collinear columns
  EXPECT_THROW(fit_readout(f, y, 0.0), NumericalError);
  EXPECT_NO_THROW(fit_readout(f, y, 0.1));
  EXPECT_THROW(fit_readout(f, y, -1.0), ConfigError);
  EXPECT_THROW(fit_readout(f.topRows(2), y.topRows(2), 1.0), ValidationError);
}

TEST(FitReadoutProperty, TrainingErrorNonDecreasingInLambda) {
  std::mt19937_64 rng(65);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = random_matrix(rng, 80, 5);
    const Eigen::MatrixXd y = f * random_matrix(rng, 5, 2) + random_matrix(rng, 80, 2);
    double prev = 0.0;
    for (double lambda : {0.0, 0.01, 0.1, 1.0, 10.0, 100.0, 1e4}) {
      const double e = training_sse(fit_readout(f, y, lambda), f, y);
      EXPECT_GE(e, prev - 1e-9 * (1.0 + prev));
      prev = e;
    }
  }
}

TEST(Evaluate, NoiseTargetsUncorrelated) {
  std::mt19937_64 rng(66);
  const Eigen::Index n = 20000;
  const auto f = random_matrix(rng, n, 4);
  const auto y = random_matrix(rng, n, 2);
  const auto r = fit_readout(f.topRows(n / 2), y.topRows(n / 2), 1.0);
  const auto s = evaluate_decoding(r, f.bottomRows(n / 2), y.bottomRows(n / 2));
  EXPECT_LT(std::fabs(s.rho_avg), 0.1);
}

TEST(Kinematics, CsvRoundTripAndResample) {
  oracle::TempDir dir("kin");
  KinematicsSeries k;
  k.t_us = {0, 10000, 20000, 30000};
  k.vx = {0.0, 1.0, 2.0, 3.0};
  k.vy = {1.0, 1.0, -1.0, -1.0};
  save_kinematics_csv(dir / "k.csv", k);
  const auto back = load_kinematics_csv(dir / "k.csv");
  EXPECT_EQ(back.t_us, k.t_us);
  EXPECT_EQ(back.vx, k.vx);
  EXPECT_EQ(back.vy, k.vy);
  // bin centers at 5, 15, 25, 35 ms; the last clamps
  const auto r = resample_kinematics(k, 10000, 4);
  EXPECT_NEAR(r(0, 0), 0.5, 1e-12);
  EXPECT_NEAR(r(2, 0), 2.5, 1e-12);
  EXPECT_NEAR(r(1, 1), 0.0, 1e-12);
  EXPECT_EQ(r(3, 0), 3.0);
}

TEST(RunDecoding, SyntheticPipelineDecodes) {
  SyntheticDecodeConfig cfg;
  cfg.kinematics.duration_s = 40.0;
  cfg.population.channels = 16;
  const std::vector<EncoderSpec> enc = {EncoderSpec::make(EncoderKind::adm),
                                        EncoderSpec::make(EncoderKind::rms_threshold),
                                        EncoderSpec::make(EncoderKind::absolute_threshold)};
  const auto reports = run_synthetic_decoding(cfg, enc);
  ASSERT_EQ(reports.size(), 3u);
  for (const auto& r : reports) {
    EXPECT_GT(r.events, 0u);
    EXPECT_GE(r.result.test.rho_avg, 0.9) << to_string(r.encoder);
  }
}

TEST(RunDecoding, RejectsTinySplit) {
  BinnedCounts c;
  c.bin_width_us = 20000;
  c.counts = Eigen::MatrixXd::Ones(5, 4);
  KinematicsSeries k;
  k.t_us = {0, 100000};
  k.vx = {0, 1};
  k.vy = {1, 0};
  EXPECT_THROW(run_decoding(c, k), ValidationError);
}
