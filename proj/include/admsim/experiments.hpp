#pragma once

// Experiment drivers shared by the CLI and the acceptance suite.

#include <admsim/decode.hpp>
#include <admsim/encode.hpp>
#include <admsim/metrics.hpp>
#include <admsim/synth.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace admsim {

struct RobustnessRow {
  double multiplier = 0.0;
  double snr_db = 0.0;
  EncoderKind encoder = EncoderKind::adm;
  MatchReport match;
};

/// For every encoder, sweeps the noise multipliers and scores each noisy
/// encoding against that encoder's clean encoding. Rows come out ordered by
/// multiplier (input order), then encoder (input order). A zero multiplier
/// yields the clean self-match.
std::vector<RobustnessRow> robustness_sweep(const SampledSignal& signal,
                                            std::span<const EncoderSpec> encoders,
                                            std::span<const double> multipliers,
                                            std::uint64_t seed,
                                            std::int64_t tolerance_us);

struct SyntheticDecodeConfig {
  synth::KinematicsConfig kinematics;
  synth::TunedPopulationConfig population;
  DecodeOptions decode;
};

struct EncoderDecodeReport {
  EncoderKind encoder = EncoderKind::adm;
  DecodeResult result;
  std::size_t events = 0;
  double energy_j = 0.0;
};

/// Velocity kinematics -> tuned population -> each encoder -> AER merge ->
/// bin -> features -> readout. One report per encoder, in input order.
std::vector<EncoderDecodeReport> run_synthetic_decoding(
    const SyntheticDecodeConfig& config, std::span<const EncoderSpec> encoders,
    const EnergyModel& energy = {});

} // namespace admsim
