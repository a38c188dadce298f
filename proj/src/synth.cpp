#include <admsim/synth.hpp>

#include <admsim/encode.hpp>
#include <admsim/error.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace admsim::synth {

namespace {

std::size_t samples_for(double duration_s, double sample_rate_hz) {
  return static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
}

std::size_t width_samples(std::int64_t width_us, double sample_rate_hz) {
  return std::max<std::size_t>(
      2, static_cast<std::size_t>(
             std::llround(static_cast<double>(width_us) * 1e-6 * sample_rate_hz)));
}

void stamp(std::vector<double>& x, std::size_t onset,
           const std::vector<double>& pulse) {
  for (std::size_t k = 0; k < pulse.size() && onset + k < x.size(); ++k) {
    x[onset + k] += pulse[k];
  }
}

/// Linear interpolation of (t_us, v) at time t.
double interpolate(const std::vector<std::int64_t>& t_us,
                   const std::vector<double>& v, double t) {
  if (t <= static_cast<double>(t_us.front())) {
    return v.front();
  }
  if (t >= static_cast<double>(t_us.back())) {
    return v.back();
  }
  const auto it = std::upper_bound(t_us.begin(), t_us.end(),
                                   static_cast<std::int64_t>(std::floor(t)));
  const auto hi = static_cast<std::size_t>(it - t_us.begin());
  const std::size_t lo = hi - 1;
  const double t0 = static_cast<double>(t_us[lo]);
  const double t1 = static_cast<double>(t_us[hi]);
  const double f = (t - t0) / (t1 - t0);
  return v[lo] + f * (v[hi] - v[lo]);
}

} // namespace

std::vector<double> biphasic_pulse(std::size_t samples, double peak_v) {
  std::vector<double> p(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    p[k] = -peak_v * std::sin(2.0 * std::numbers::pi * static_cast<double>(k) /
                              static_cast<double>(samples));
  }
  return p;
}

ActionPotentialRecording make_action_potential_train(
    const ActionPotentialConfig& config) {
  if (!(config.sample_rate_hz > 0.0) || !(config.duration_s > 0.0) ||
      !(config.mean_rate_hz > 0.0)) {
    throw ConfigError("synthetic train needs positive rate and duration");
  }
  const std::size_t n = samples_for(config.duration_s, config.sample_rate_hz);
  const double fs = config.sample_rate_hz;
  std::vector<double> x(n, 0.0);

  std::mt19937_64 rng(config.seed);
  const double min_gap_s = static_cast<double>(config.min_interval_us) * 1e-6;
  const double extra_mean_s = std::max(1.0 / config.mean_rate_hz - min_gap_s, 1e-6);
  std::exponential_distribution<double> extra(1.0 / extra_mean_s);

  const auto pulse = biphasic_pulse(width_samples(config.pulse_width_us, fs),
                                    config.peak_v);
  ActionPotentialRecording rec;
  double t = extra(rng);
  while (true) {
    const auto onset = static_cast<std::size_t>(std::llround(t * fs));
    if (onset + pulse.size() >= n) {
      break;
    }
    stamp(x, onset, pulse);
    rec.pulse_onsets_us.push_back(
        std::llround(static_cast<double>(onset) * 1e6 / fs));
    t += min_gap_s + extra(rng);
  }

  const double w = 2.0 * std::numbers::pi * config.lfp_freq_hz / fs;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] += config.lfp_amplitude_v * std::sin(w * static_cast<double>(i));
    if (config.background_noise_v > 0.0) {
      x[i] += config.background_noise_v * gauss(rng);
    }
  }
  rec.signal = SampledSignal(std::move(x), fs);
  return rec;
}

KinematicsSeries make_velocity_kinematics(const KinematicsConfig& config) {
  if (!(config.duration_s > 0.0) || config.step_us <= 0) {
    throw ConfigError("kinematics need positive duration and step");
  }
  KinematicsSeries k;
  const auto steps = static_cast<std::int64_t>(
      std::floor(config.duration_s * 1e6 / static_cast<double>(config.step_us)));
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (std::int64_t s = 0; s <= steps; ++s) {
    const std::int64_t t_us = s * config.step_us;
    const double t = static_cast<double>(t_us) * 1e-6;
    k.t_us.push_back(t_us);
    k.vx.push_back(std::sin(two_pi * 0.21 * t) +
                   0.5 * std::sin(two_pi * 0.053 * t + 0.7));
    k.vy.push_back(std::cos(two_pi * 0.17 * t + 0.3) +
                   0.5 * std::sin(two_pi * 0.071 * t + 1.9));
  }
  return k;
}

double preferred_direction(const TunedPopulationConfig& config, int channel) {
  return 2.0 * std::numbers::pi * static_cast<double>(channel) /
         static_cast<double>(config.channels);
}

SampledSignal make_tuned_channel(const KinematicsSeries& kinematics,
                                 const TunedPopulationConfig& config,
                                 int channel) {
  kinematics.validate();
  if (channel < 0 || channel >= config.channels) {
    throw ConfigError("channel index outside the population");
  }
  const double fs = config.sample_rate_hz;
  const double duration_s = static_cast<double>(kinematics.t_us.back()) * 1e-6;
  const std::size_t n = samples_for(duration_s, fs);
  std::vector<double> x(n, 0.0);

  const double theta = preferred_direction(config, channel);
  const double cx = std::cos(theta);
  const double cy = std::sin(theta);
  auto rate_at = [&](double t_us) {
    const double vx = interpolate(kinematics.t_us, kinematics.vx, t_us);
    const double vy = interpolate(kinematics.t_us, kinematics.vy, t_us);
    return std::max(0.0, config.base_rate_hz + config.depth_hz * (cx * vx + cy * vy));
  };
  double rate_max = 0.0;
  for (std::size_t i = 0; i < kinematics.t_us.size(); ++i) {
    rate_max = std::max(rate_max, config.base_rate_hz +
                                      config.depth_hz * (cx * kinematics.vx[i] +
                                                         cy * kinematics.vy[i]));
  }
  rate_max *= 1.05;

  std::mt19937_64 rng(level_seed(config.seed, static_cast<std::size_t>(channel)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto pulse = biphasic_pulse(width_samples(config.pulse_width_us, fs),
                                    config.peak_v);
  if (rate_max > 0.0) {
    std::exponential_distribution<double> gap(rate_max);
    const double dead_s = static_cast<double>(config.min_interval_us) * 1e-6;
    double t = gap(rng);
    while (t < duration_s) {
      if (unit(rng) * rate_max <= rate_at(t * 1e6)) {
        const auto onset = static_cast<std::size_t>(std::llround(t * fs));
        if (onset + pulse.size() >= n) {
          break;
        }
        stamp(x, onset, pulse);
        t += dead_s;
      }
      t += gap(rng);
    }
  }
  if (config.background_noise_v > 0.0) {
    std::normal_distribution<double> gauss(0.0, config.background_noise_v);
    for (double& v : x) {
      v += gauss(rng);
    }
  }
  return SampledSignal(std::move(x), fs);
}

} // namespace admsim::synth
