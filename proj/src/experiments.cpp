#include <admsim/experiments.hpp>

#include <admsim/error.hpp>

namespace admsim {

std::vector<RobustnessRow> robustness_sweep(const SampledSignal& signal,
                                            std::span<const EncoderSpec> encoders,
                                            std::span<const double> multipliers,
                                            std::uint64_t seed,
                                            std::int64_t tolerance_us) {
  if (encoders.empty()) {
    throw ConfigError("robustness sweep needs at least one encoder");
  }
  // sweeps[e][k + 1] is encoder e at multipliers[k]; zero multipliers map to
  // the clean entry 0.
  std::vector<std::vector<SweepEntry>> sweeps;
  for (const auto& enc : encoders) {
    sweeps.push_back(sweep_snr(signal, enc, multipliers, seed));
  }

  std::vector<RobustnessRow> rows;
  for (std::size_t k = 0; k < multipliers.size(); ++k) {
    for (std::size_t e = 0; e < encoders.size(); ++e) {
      const auto& entries = sweeps[e];
      std::size_t slot = 0;
      if (multipliers[k] != 0.0) {
        // Count nonzero multipliers up to and including k.
        for (std::size_t j = 0; j <= k; ++j) {
          slot += multipliers[j] != 0.0 ? 1 : 0;
        }
      }
      RobustnessRow row;
      row.multiplier = multipliers[k];
      row.snr_db = entries[slot].snr_db;
      row.encoder = encoders[e].kind;
      row.match = match_spike_trains(entries[0].train, entries[slot].train,
                                     tolerance_us);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<EncoderDecodeReport> run_synthetic_decoding(
    const SyntheticDecodeConfig& config, std::span<const EncoderSpec> encoders,
    const EnergyModel& energy) {
  if (encoders.empty()) {
    throw ConfigError("decoding comparison needs at least one encoder");
  }
  for (const auto& enc : encoders) {
    enc.validate();
  }
  const KinematicsSeries kinematics =
      synth::make_velocity_kinematics(config.kinematics);

  std::vector<std::vector<ChannelTrain>> per_encoder(encoders.size());
  std::int64_t span_us = 0;
  for (int ch = 0; ch < config.population.channels; ++ch) {
    const SampledSignal recording =
        synth::make_tuned_channel(kinematics, config.population, ch);
    span_us = recording.end_us();
    for (std::size_t e = 0; e < encoders.size(); ++e) {
      per_encoder[e].push_back({ch, encoders[e].encode(recording)});
    }
  }

  std::vector<EncoderDecodeReport> reports;
  for (std::size_t e = 0; e < encoders.size(); ++e) {
    const AerStream stream = merge_channels(per_encoder[e]);
    const BinnedCounts counts =
        bin_spikes(stream, config.population.channels,
                   config.decode.bin_width_us, span_us);
    EncoderDecodeReport report;
    report.encoder = encoders[e].kind;
    report.result = run_decoding(counts, kinematics, config.decode);
    report.events = stream.size();
    report.energy_j = static_cast<double>(stream.size()) * energy.energy_per_spike_j;
    reports.push_back(std::move(report));
  }
  return reports;
}

} // namespace admsim
