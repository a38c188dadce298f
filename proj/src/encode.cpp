#include <admsim/encode.hpp>

#include <admsim/error.hpp>
#include <admsim/simd/kernels.hpp>

#include <cmath>
#include <limits>
#include <string>

namespace admsim {

namespace {

void require_nonempty(const SampledSignal& signal) {
  if (signal.empty()) {
    throw ValidationError("cannot encode an empty signal");
  }
}

/// First index >= from whose timestamp is at or after t_us.
std::size_t first_at_or_after(const SampledSignal& signal, std::size_t from,
                              std::int64_t t_us) {
  std::size_t k = from;
  while (k < signal.size() && signal.time_us(k) < t_us) {
    ++k;
  }
  return k;
}

} // namespace

void AdmConfig::validate() const {
  if (!(delta_on_v > 0.0) || !(delta_off_v > 0.0) ||
      !std::isfinite(delta_on_v) || !std::isfinite(delta_off_v)) {
    throw ConfigError("delta thresholds must be positive and finite");
  }
  if (!(gain_a > 0.0) || !std::isfinite(gain_a)) {
    throw ConfigError("amplifier gain must be positive and finite");
  }
  if (reset_delay_us < 0 || refractory_us < 0) {
    throw ConfigError("reset delay and refractory period must be >= 0");
  }
  if (!std::isfinite(v_ref)) {
    throw ConfigError("amplifier reference must be finite");
  }
}

SpikeTrain adm_encode(const SampledSignal& signal, const AdmConfig& config) {
  config.validate();
  require_nonempty(signal);

  const auto x = signal.samples();
  SpikeTrain train;
  train.duration_us = signal.end_us();

  AdmState state{x[0], AdmPhase::active, 0};
  std::size_t next = 1;
  while (next < x.size()) {
    const std::size_t hit = simd::find_level_crossing(
        x, next, state.baseline_v, config.delta_on_v, config.delta_off_v);
    if (hit == x.size()) {
      break;
    }
    const std::int64_t t = signal.time_us(hit);
    const Polarity p = x[hit] - state.baseline_v >= config.delta_on_v
                           ? Polarity::on
                           : Polarity::off;
    train.events.push_back({t, p});

    state.phase = AdmPhase::refractory;
    state.refractory_end_us = t + config.dead_time_us();
    const std::size_t release =
        first_at_or_after(signal, hit, state.refractory_end_us);
    if (release == x.size()) {
      break;
    }
    state.baseline_v = x[release];
    state.phase = AdmPhase::active;
    next = release + 1;
  }
  return train;
}

CircuitTrace adm_circuit_encode(const SampledSignal& signal,
                                const AdmConfig& config) {
  config.validate();
  require_nonempty(signal);

  const auto x = signal.samples();
  const double a = config.gain_a;
  const double on_swing = a * config.delta_on_v;
  const double off_swing = a * config.delta_off_v;

  CircuitTrace out;
  out.train.duration_us = signal.end_us();
  std::vector<double> v_out(x.size(), config.v_ref);

  bool in_reset = false;
  std::int64_t reset_end_us = 0;
  double v_in_at_reset = x[0];

  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::int64_t t = signal.time_us(i);
    if (in_reset) {
      if (t < reset_end_us) {
        continue; // clamped to v_ref
      }
      in_reset = false;
      v_in_at_reset = x[i];
    }

    const double dv_in = x[i] - v_in_at_reset;
    // Inverting stage: the swing below v_ref is +A dV_in.
    const double swing = a * dv_in;
    v_out[i] = config.v_ref - swing;

    // Rounded swings can tie with the rounded comparator level while the
    // input difference sits just inside it; such ties resolve against the
    // input difference.
    const bool on = swing > on_swing ||
                    (swing == on_swing && dv_in >= config.delta_on_v);
    const bool off = -swing > off_swing ||
                     (-swing == off_swing && dv_in <= -config.delta_off_v);
    if (on || off) {
      out.train.events.push_back({t, on ? Polarity::on : Polarity::off});
      in_reset = true;
      reset_end_us = t + config.reset_delay_us + config.refractory_us;
      if (reset_end_us <= t) {
        // Zero dead time releases on the crossing sample itself.
        in_reset = false;
        v_in_at_reset = x[i];
      }
    }
  }
  out.v_out = signal.with_samples(std::move(v_out));
  return out;
}

void ThresholdConfig::validate() const {
  if (!std::isfinite(k_or_level) || k_or_level == 0.0) {
    throw ConfigError(mode == ThresholdMode::rms_multiplier
                          ? "rms multiplier must be finite and nonzero"
                          : "absolute threshold level must be finite and "
                            "nonzero");
  }
  if (refractory_us < 0) {
    throw ConfigError("refractory period must be >= 0");
  }
}

SpikeTrain threshold_encode(const SampledSignal& signal,
                            const ThresholdConfig& config) {
  config.validate();
  require_nonempty(signal);

  const auto x = signal.samples();
  double threshold = config.k_or_level;
  if (config.mode == ThresholdMode::rms_multiplier) {
    const double r = rms(x);
    if (!(r > 0.0)) {
      throw ConfigError("rms-multiplier threshold needs a signal with "
                        "nonzero rms");
    }
    threshold = config.k_or_level * r;
  }
  const Polarity p = threshold > 0.0 ? Polarity::on : Polarity::off;

  SpikeTrain train;
  train.duration_us = signal.end_us();
  std::size_t next = 1;
  while (next < x.size()) {
    const std::size_t hit = simd::find_threshold_crossing(x, next, threshold);
    if (hit == x.size()) {
      break;
    }
    const std::int64_t t = signal.time_us(hit);
    train.events.push_back({t, p});
    next = first_at_or_after(signal, hit + 1, t + config.refractory_us);
  }
  return train;
}

std::string_view to_string(EncoderKind kind) noexcept {
  switch (kind) {
  case EncoderKind::adm:
    return "adm";
  case EncoderKind::adm_circuit:
    return "adm-circuit";
  case EncoderKind::rms_threshold:
    return "rms";
  case EncoderKind::absolute_threshold:
    return "abs";
  }
  return "unknown";
}

EncoderKind parse_encoder_kind(std::string_view name) {
  for (EncoderKind k : {EncoderKind::adm, EncoderKind::adm_circuit,
                        EncoderKind::rms_threshold,
                        EncoderKind::absolute_threshold}) {
    if (name == to_string(k)) {
      return k;
    }
  }
  throw ConfigError("unknown encoder '" + std::string(name) +
                    "' (expected adm, adm-circuit, rms or abs)");
}

EncoderSpec EncoderSpec::make(EncoderKind kind) {
  EncoderSpec spec;
  spec.kind = kind;
  if (kind == EncoderKind::absolute_threshold) {
    spec.threshold.mode = ThresholdMode::absolute;
    spec.threshold.k_or_level = -0.110;
  }
  return spec;
}

void EncoderSpec::validate() const {
  switch (kind) {
  case EncoderKind::adm:
  case EncoderKind::adm_circuit:
    adm.validate();
    break;
  case EncoderKind::rms_threshold:
    if (threshold.mode != ThresholdMode::rms_multiplier) {
      throw ConfigError("rms encoder requires rms-multiplier mode");
    }
    threshold.validate();
    break;
  case EncoderKind::absolute_threshold:
    if (threshold.mode != ThresholdMode::absolute) {
      throw ConfigError("abs encoder requires absolute mode");
    }
    threshold.validate();
    break;
  }
}

SpikeTrain EncoderSpec::encode(const SampledSignal& signal) const {
  switch (kind) {
  case EncoderKind::adm:
    return adm_encode(signal, adm);
  case EncoderKind::adm_circuit:
    return adm_circuit_encode(signal, adm).train;
  case EncoderKind::rms_threshold:
  case EncoderKind::absolute_threshold:
    return threshold_encode(signal, threshold);
  }
  return {};
}

std::uint64_t level_seed(std::uint64_t seed, std::size_t level) noexcept {
  // splitmix64 finalizer over (seed, level)
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (level + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<SweepEntry> sweep_snr(const SampledSignal& signal,
                                  const EncoderSpec& encoder,
                                  std::span<const double> multipliers,
                                  std::uint64_t seed) {
  if (multipliers.empty()) {
    throw ConfigError("noise sweep needs at least one multiplier");
  }
  for (double m : multipliers) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw ConfigError("noise multipliers must be finite and >= 0");
    }
  }
  encoder.validate();

  std::vector<SweepEntry> out;
  SweepEntry clean;
  clean.snr_db = std::numeric_limits<double>::infinity();
  clean.train = encoder.encode(signal);
  out.push_back(std::move(clean));

  for (std::size_t k = 0; k < multipliers.size(); ++k) {
    if (multipliers[k] == 0.0) {
      continue;
    }
    auto noisy = inject_awgn(signal, multipliers[k], level_seed(seed, k));
    SweepEntry e;
    e.multiplier = multipliers[k];
    e.sigma_v = noisy.sigma_v;
    e.degenerate = noisy.degenerate;
    e.snr_db = noisy.degenerate ? std::numeric_limits<double>::infinity()
                                : estimate_snr_db(signal, noisy.sigma_v);
    e.train = encoder.encode(noisy.signal);
    out.push_back(std::move(e));
  }
  return out;
}

} // namespace admsim
