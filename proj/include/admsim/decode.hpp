#pragma once

// Desk-scale decoding harness: spike binning, leaky-integrator features, a
// ridge-regularized linear readout and Pearson scoring of predicted
// velocities.

#include <admsim/aer.hpp>
#include <admsim/spike_train.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <vector>

namespace admsim {

/// Event counts, bins x (channels * 2). Column 2c holds OFF events of
/// channel c, column 2c + 1 its ON events. Bin b covers [b w, (b + 1) w).
struct BinnedCounts {
  Eigen::MatrixXd counts;
  std::int64_t bin_width_us = 1;

  Eigen::Index bins() const noexcept { return counts.rows(); }
};

struct KinematicsSeries {
  std::vector<std::int64_t> t_us;
  std::vector<double> vx;
  std::vector<double> vy;

  /// Equal lengths, at least one point, strictly increasing timestamps.
  void validate() const;
};

/// `time_s,vx,vy` CSV.
KinematicsSeries load_kinematics_csv(const std::filesystem::path& path);
void save_kinematics_csv(const std::filesystem::path& path,
                         const KinematicsSeries& kinematics);

struct LinearReadout {
  Eigen::MatrixXd weights; // features x 2
  Eigen::Vector2d bias = Eigen::Vector2d::Zero();
  double ridge_lambda = 0.0;

  Eigen::MatrixXd predict(const Eigen::MatrixXd& features) const;
};

struct DecodingScore {
  double rho_x = 0.0;
  double rho_y = 0.0;
  double rho_avg = 0.0;
};

/// floor(span_us / bin_width_us) bins; events at or past the last full bin
/// are dropped.
BinnedCounts bin_spikes(const SpikeTrain& train, std::int64_t bin_width_us,
                        std::int64_t span_us);
BinnedCounts bin_spikes(const AerStream& stream, int channels,
                        std::int64_t bin_width_us, std::int64_t span_us);

/// y[n] = alpha y[n-1] + c[n], alpha = exp(-bin_width / tau), per column.
Eigen::MatrixXd leaky_features(const BinnedCounts& counts, std::int64_t tau_us);

/// Kinematics linearly interpolated at bin centers, bins x 2 (vx, vy).
/// Centers outside the series clamp to the end values.
Eigen::MatrixXd resample_kinematics(const KinematicsSeries& kinematics,
                                    std::int64_t bin_width_us,
                                    Eigen::Index bins);

/// Ridge least squares with an unpenalized bias column. Throws
/// NumericalError if the normal equations are singular (at lambda = 0).
LinearReadout fit_readout(const Eigen::MatrixXd& features,
                          const Eigen::MatrixXd& targets, double ridge_lambda);

DecodingScore evaluate_decoding(const LinearReadout& readout,
                                const Eigen::MatrixXd& features,
                                const Eigen::MatrixXd& targets);

struct DecodeOptions {
  std::int64_t bin_width_us = 20000;
  std::int64_t tau_us = 100000;
  /// Candidate ridge strengths; the one with the best validation rho_avg
  /// wins. A single entry skips selection.
  std::vector<double> lambda_grid = {1e-2, 1e-1, 1.0, 10.0, 100.0, 1000.0, 10000.0};
  /// Contiguous split: first train_fraction fits, next validation_fraction
  /// selects lambda, the rest is the held-out test set.
  double train_fraction = 0.6;
  double validation_fraction = 0.2;
};

struct DecodeResult {
  DecodingScore train;
  DecodingScore test;
  double lambda = 0.0;
  LinearReadout readout;
};

/// bin -> features -> lambda selection -> refit on train + validation ->
/// score on the test split.
DecodeResult run_decoding(const BinnedCounts& counts,
                          const KinematicsSeries& kinematics,
                          const DecodeOptions& options = {});

} // namespace admsim
