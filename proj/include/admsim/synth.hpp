#pragma once

// Synthetic recordings used by the experiment harness and the CLI `synth`
// command: biphasic action-potential trains over a slow field-potential
// background, and multi-channel rate-modulated recordings driven by
// velocity kinematics.

#include <admsim/decode.hpp>
#include <admsim/signal.hpp>

#include <cstdint>
#include <vector>

namespace admsim::synth {

struct ActionPotentialConfig {
  double sample_rate_hz = 30000.0;
  double duration_s = 4.0;
  /// Trough-to-zero amplitude of each pulse; negative lobe first.
  double peak_v = 0.220;
  std::int64_t pulse_width_us = 1000;
  /// Pulses follow a dead-time Poisson process: min_interval plus an
  /// exponential gap chosen so the mean rate is mean_rate_hz.
  double mean_rate_hz = 200.0;
  std::int64_t min_interval_us = 3000;
  /// Slow sinusoidal field-potential background.
  double lfp_amplitude_v = 0.0323;
  double lfp_freq_hz = 8.0;
  /// White background noise added to the clean recording.
  double background_noise_v = 0.0;
  std::uint64_t seed = 1;
};

struct ActionPotentialRecording {
  SampledSignal signal;
  /// Onset time of every pulse.
  std::vector<std::int64_t> pulse_onsets_us;
};

/// One biphasic pulse, -peak * sin(2 pi k / n) for k in [0, n).
std::vector<double> biphasic_pulse(std::size_t samples, double peak_v);

ActionPotentialRecording make_action_potential_train(
    const ActionPotentialConfig& config);

struct KinematicsConfig {
  double duration_s = 120.0;
  /// Sampling of the exported kinematics series.
  std::int64_t step_us = 10000;
};

/// Smooth two-axis velocity built from incommensurate sinusoids.
KinematicsSeries make_velocity_kinematics(const KinematicsConfig& config);

struct TunedPopulationConfig {
  int channels = 32;
  double sample_rate_hz = 30000.0;
  /// Cosine tuning: rate = base + depth * (cos(theta) vx + sin(theta) vy),
  /// clipped at zero; theta spread uniformly over the circle.
  double base_rate_hz = 40.0;
  double depth_hz = 30.0;
  double peak_v = 0.220;
  std::int64_t pulse_width_us = 1000;
  std::int64_t min_interval_us = 3000;
  double background_noise_v = 0.010;
  std::uint64_t seed = 7;
};

/// Preferred direction of a channel, evenly spread over the circle.
double preferred_direction(const TunedPopulationConfig& config, int channel);

/// Recording of one channel of the population, pulses drawn from the tuned
/// inhomogeneous rate by thinning. Channels get independent random streams
/// derived from (seed, channel), so they can be generated one at a time.
SampledSignal make_tuned_channel(const KinematicsSeries& kinematics,
                                 const TunedPopulationConfig& config,
                                 int channel);

} // namespace admsim::synth
