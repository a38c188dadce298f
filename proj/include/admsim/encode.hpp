#pragma once

// Spike encoders: the asynchronous delta modulator (behavioral and
// first-order circuit models) and the two amplitude-threshold references.

#include <admsim/signal.hpp>
#include <admsim/spike_train.hpp>

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace admsim {

/// Parameters of the asynchronous delta modulator.
struct AdmConfig {
  /// Upward (+delta) and downward (-delta magnitude) thresholds, volts.
  double delta_on_v = 0.150;
  double delta_off_v = 0.150;
  /// Differencing amplifier gain C1/C2; 12.14 dB mid-band.
  double gain_a = 4.044;
  /// Crossing-to-reset delay (spike width).
  std::int64_t reset_delay_us = 100;
  /// Reset pulse width (refractory period).
  std::int64_t refractory_us = 1000;
  /// Amplifier output reference the reset returns to.
  double v_ref = 0.6;

  void validate() const;
  /// The encoder cannot re-arm until the reset completes.
  std::int64_t dead_time_us() const noexcept {
    return reset_delay_us + refractory_us;
  }
};

enum class AdmPhase { active, refractory };

/// Running state of one delta-modulator channel.
struct AdmState {
  double baseline_v = 0.0;
  AdmPhase phase = AdmPhase::active;
  std::int64_t refractory_end_us = 0;
};

/// Level-crossing simulation. The baseline starts at the first sample; a
/// crossing emits an event at the crossing sample and holds the channel in
/// reset for reset_delay + refractory, after which the baseline is resampled
/// from the input.
SpikeTrain adm_encode(const SampledSignal& signal, const AdmConfig& config);

struct CircuitTrace {
  SpikeTrain train;
  /// Amplifier output V_out, one value per input sample.
  SampledSignal v_out;
};

/// First-order circuit model: V_out = v_ref - A (V_in - V_in(reset)) between
/// resets, dual comparators at v_ref -/+ A delta, output clamped to v_ref
/// while reset is asserted. Emits the same events as adm_encode.
CircuitTrace adm_circuit_encode(const SampledSignal& signal,
                                const AdmConfig& config);

enum class ThresholdMode { rms_multiplier, absolute };

struct ThresholdConfig {
  ThresholdMode mode = ThresholdMode::rms_multiplier;
  /// Multiplier of rms(signal) in rms mode, volts in absolute mode. The sign
  /// selects the direction: negative thresholds emit OFF events.
  double k_or_level = -4.5;
  std::int64_t refractory_us = 0;

  void validate() const;
};

/// Emits an event each time the signal moves from the zero side of the
/// threshold to at-or-beyond it, honoring refractory_us of dead time.
SpikeTrain threshold_encode(const SampledSignal& signal,
                            const ThresholdConfig& config);

enum class EncoderKind { adm, adm_circuit, rms_threshold, absolute_threshold };

std::string_view to_string(EncoderKind kind) noexcept;
/// Accepts adm, adm-circuit, rms, abs. Throws ConfigError otherwise.
EncoderKind parse_encoder_kind(std::string_view name);

/// An encoder choice with its parameters.
struct EncoderSpec {
  EncoderKind kind = EncoderKind::adm;
  AdmConfig adm;
  ThresholdConfig threshold;

  static EncoderSpec make(EncoderKind kind);
  void validate() const;
  SpikeTrain encode(const SampledSignal& signal) const;
};

struct SweepEntry {
  double multiplier = 0.0;
  /// +infinity for the clean reference.
  double snr_db = 0.0;
  double sigma_v = 0.0;
  bool degenerate = false;
  SpikeTrain train;
};

/// Noise-robustness sweep. Entry 0 is always the clean encoding
/// (multiplier 0); each nonzero multiplier follows in input order. Level k
/// draws its noise from a seed derived from (seed, k), so every encoder sees
/// the same realization at the same level.
std::vector<SweepEntry> sweep_snr(const SampledSignal& signal,
                                  const EncoderSpec& encoder,
                                  std::span<const double> multipliers,
                                  std::uint64_t seed);

/// Seed used by sweep_snr for the k-th multiplier.
std::uint64_t level_seed(std::uint64_t seed, std::size_t level) noexcept;

} // namespace admsim
