#pragma once

// Signal ingestion, the band-limited front-end model, noise injection and
// noise-floor estimation. Voltages are volts and times are microseconds
// throughout; files carrying seconds are converted on load.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace admsim {

/// Uniformly sampled analog waveform. Construction validates that the rate is
/// positive and every sample finite.
class SampledSignal {
public:
  SampledSignal() = default;
  SampledSignal(std::vector<double> samples, double sample_rate_hz,
                std::int64_t t0_us = 0);

  std::span<const double> samples() const noexcept { return samples_; }
  double operator[](std::size_t i) const noexcept { return samples_[i]; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  std::int64_t t0_us() const noexcept { return t0_us_; }

  /// t0 + round(i * 1e6 / fs).
  std::int64_t time_us(std::size_t i) const noexcept;
  /// Exclusive end of the sampled span, time_us(size()).
  std::int64_t end_us() const noexcept { return time_us(samples_.size()); }

  /// Copy with the same timing and new sample values.
  SampledSignal with_samples(std::vector<double> samples) const;

private:
  std::vector<double> samples_;
  double sample_rate_hz_ = 1.0;
  std::int64_t t0_us_ = 0;
};

enum class SignalFormat { csv, raw_f32_le };

/// Reads a signal from disk. CSV rows are `time_s,value_v` (rate inferred
/// from the time column, which must be uniform within half a sample period)
/// or a single `value_v` column (rate taken from sample_rate_hz). Raw files
/// are headerless little-endian float32 volts.
SampledSignal load_signal(const std::filesystem::path& path,
                          SignalFormat format, double sample_rate_hz);

/// Writes `time_s,value_v` CSV with enough digits to reload the exact rate.
void save_signal_csv(const std::filesystem::path& path,
                     const SampledSignal& signal);

struct FrontEndConfig {
  double midband_gain_db = 12.14;
  double f_low_hz = 80.0;
  double f_high_hz = 8000.0;
  double input_noise_vrms = 14.990e-6;
  /// Reported spectral density (V/sqrt(Hz)); carried as metadata only, the
  /// simulated noise is calibrated to input_noise_vrms.
  double noise_density_v_per_rthz = 91.88e-9;

  void validate() const;
  double midband_gain_linear() const;
};

/// First-order high-pass at f_low cascaded with a first-order low-pass at
/// f_high, both bilinear with prewarped corners, scaled to the mid-band gain
/// at sqrt(f_low * f_high).
class FrontEndFilter {
public:
  FrontEndFilter(const FrontEndConfig& config, double sample_rate_hz);

  /// Discrete-time magnitude response |H(e^{j 2 pi f / fs})|.
  double magnitude_at(double freq_hz) const;

  std::vector<double> process(std::span<const double> input) const;

private:
  struct Section {
    double b0, b1, a1;
  };
  Section highpass_{};
  Section lowpass_{};
  double scale_ = 1.0;
  double sample_rate_hz_;
};

/// Fails with ConfigError unless sample_rate_hz > 2 * f_high_hz.
SampledSignal bandpass_front_end(const SampledSignal& signal,
                                 const FrontEndConfig& config);

/// Drives the front end with a unit sinusoid and fits the steady-state output
/// amplitude by least squares; returns the linear gain.
double measure_sinusoid_gain(const FrontEndConfig& config,
                             double sample_rate_hz, double freq_hz);

struct NoiseInjection {
  SampledSignal signal;
  double sigma_v = 0.0;
  /// Set when level_multiplier > 0 but median |x| is zero, so no noise
  /// could be added.
  bool degenerate = false;
};

/// Adds i.i.d. zero-mean Gaussian noise with sigma = level_multiplier *
/// median(|x|). Deterministic for a fixed seed.
NoiseInjection inject_awgn(const SampledSignal& signal,
                           double level_multiplier, std::uint64_t rng_seed);

/// median(|x - median(x)|) / 0.6745.
double estimate_noise_sigma_mad(const SampledSignal& signal);

/// 20 log10(rms(signal) / noise_sigma).
double estimate_snr_db(const SampledSignal& signal, double noise_sigma);

double rms(std::span<const double> x);
double mean(std::span<const double> x);
double median(std::vector<double> values);
double median_abs(std::span<const double> x);

} // namespace admsim
