#include "cli.hpp"

#include <admsim/aer.hpp>
#include <admsim/decode.hpp>
#include <admsim/encode.hpp>
#include <admsim/error.hpp>
#include <admsim/experiments.hpp>
#include <admsim/kv_config.hpp>
#include <admsim/metrics.hpp>
#include <admsim/signal.hpp>
#include <admsim/synth.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

namespace admsim::cli {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// Experiment configuration: every key has a default; config files and flags
// both go through the same setters, flags last.

struct ExperimentConfig {
  std::string input;
  std::string format = "csv";
  double rate_hz = 0.0;

  bool front_end = false;
  FrontEndConfig front_end_config;

  EncoderKind encoder = EncoderKind::adm;
  std::vector<EncoderKind> encoders;
  AdmConfig adm;
  double rms_k = -4.5;
  double abs_level = -0.110;
  std::int64_t dead_time_us = 0;

  double noise = 0.0;
  std::vector<double> multipliers = {1.0, 1.5, 2.0, 4.0};
  std::uint64_t seed = 1;
  std::int64_t tolerance_us = kDefaultMatchToleranceUs;
  EnergyModel energy;

  std::string out;
  std::string vout;
  std::string reference;
  std::string candidate;
  std::string kinematics;
  std::string aer;
  std::string spikes;
  std::vector<std::pair<int, std::string>> trains;
  int channel = 0;
  std::optional<std::uint64_t> service_time_us;

  bool synthetic = false;
  std::int64_t bin_us = 20000;
  std::int64_t tau_us = 100000;
  std::optional<double> lambda; // unset: grid selection
  std::optional<int> channels;
  std::optional<double> duration_s;
  double mean_rate_hz = 200.0;

  EncoderSpec encoder_spec(EncoderKind kind) const {
    EncoderSpec spec = EncoderSpec::make(kind);
    spec.adm = adm;
    spec.threshold.refractory_us = dead_time_us;
    spec.threshold.k_or_level =
        kind == EncoderKind::absolute_threshold ? abs_level : rms_k;
    return spec;
  }
};

bool parse_bool(std::string_view v, std::string_view key) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") {
    return true;
  }
  if (v == "false" || v == "0" || v == "no" || v == "off") {
    return false;
  }
  throw ConfigError("expected a boolean for '" + std::string(key) + "'");
}

std::vector<EncoderKind> parse_encoder_list(std::string_view v) {
  std::vector<EncoderKind> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = v.find(',', start);
    out.push_back(parse_encoder_kind(v.substr(start, comma - start)));
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return out;
}

std::uint64_t parse_seed(std::string_view v) {
  const auto s = parse_integer(v, "seed");
  if (s < 0) {
    throw ConfigError("seed must be non-negative");
  }
  return static_cast<std::uint64_t>(s);
}

std::vector<std::pair<int, std::string>> parse_train_list(std::string_view v) {
  std::vector<std::pair<int, std::string>> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = v.find(',', start);
    const auto item = v.substr(start, comma - start);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("train entries are `channel=path`, got '" +
                        std::string(item) + "'");
    }
    out.emplace_back(static_cast<int>(parse_integer(item.substr(0, eq), "channel")),
                     std::string(item.substr(eq + 1)));
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"in", [](auto& c, auto v) { c.input = v; }},
      {"format",
       [](auto& c, auto v) {
         if (v != "csv" && v != "raw") {
           throw ConfigError("format must be csv or raw");
         }
         c.format = v;
       }},
      {"rate", [](auto& c, auto v) { c.rate_hz = parse_real(v, "rate"); }},
      {"front-end", [](auto& c, auto v) { c.front_end = parse_bool(v, "front-end"); }},
      {"fe-gain-db",
       [](auto& c, auto v) { c.front_end_config.midband_gain_db = parse_real(v, "fe-gain-db"); }},
      {"fe-low", [](auto& c, auto v) { c.front_end_config.f_low_hz = parse_real(v, "fe-low"); }},
      {"fe-high", [](auto& c, auto v) { c.front_end_config.f_high_hz = parse_real(v, "fe-high"); }},
      {"encoder", [](auto& c, auto v) { c.encoder = parse_encoder_kind(v); }},
      {"encoders", [](auto& c, auto v) { c.encoders = parse_encoder_list(v); }},
      {"delta",
       [](auto& c, auto v) {
         c.adm.delta_on_v = parse_voltage(v);
         c.adm.delta_off_v = c.adm.delta_on_v;
       }},
      {"delta-on", [](auto& c, auto v) { c.adm.delta_on_v = parse_voltage(v); }},
      {"delta-off", [](auto& c, auto v) { c.adm.delta_off_v = parse_voltage(v); }},
      {"gain", [](auto& c, auto v) { c.adm.gain_a = parse_real(v, "gain"); }},
      {"reset-delay", [](auto& c, auto v) { c.adm.reset_delay_us = parse_duration_us(v); }},
      {"refractory", [](auto& c, auto v) { c.adm.refractory_us = parse_duration_us(v); }},
      {"v-ref", [](auto& c, auto v) { c.adm.v_ref = parse_voltage(v); }},
      {"k", [](auto& c, auto v) { c.rms_k = parse_real(v, "k"); }},
      {"level", [](auto& c, auto v) { c.abs_level = parse_voltage(v); }},
      {"dead-time", [](auto& c, auto v) { c.dead_time_us = parse_duration_us(v); }},
      {"noise", [](auto& c, auto v) { c.noise = parse_real(v, "noise"); }},
      {"multipliers",
       [](auto& c, auto v) { c.multipliers = parse_real_list(v, "multipliers"); }},
      {"seed", [](auto& c, auto v) { c.seed = parse_seed(v); }},
      {"tolerance", [](auto& c, auto v) { c.tolerance_us = parse_duration_us(v); }},
      {"energy-per-spike",
       [](auto& c, auto v) { c.energy.energy_per_spike_j = parse_real(v, "energy-per-spike"); }},
      {"dynamic-power",
       [](auto& c, auto v) { c.energy.dynamic_power_w = parse_real(v, "dynamic-power"); }},
      {"supply", [](auto& c, auto v) { c.energy.supply_v = parse_voltage(v); }},
      {"out", [](auto& c, auto v) { c.out = v; }},
      {"vout", [](auto& c, auto v) { c.vout = v; }},
      {"reference", [](auto& c, auto v) { c.reference = v; }},
      {"candidate", [](auto& c, auto v) { c.candidate = v; }},
      {"kinematics", [](auto& c, auto v) { c.kinematics = v; }},
      {"aer", [](auto& c, auto v) { c.aer = v; }},
      {"spikes", [](auto& c, auto v) { c.spikes = v; }},
      {"train", [](auto& c, auto v) { c.trains = parse_train_list(v); }},
      {"channel", [](auto& c, auto v) { c.channel = static_cast<int>(parse_integer(v, "channel")); }},
      {"service-time",
       [](auto& c, auto v) {
         const auto s = parse_duration_us(v);
         if (s < 0) {
           throw ConfigError("service time must be >= 0");
         }
         c.service_time_us = static_cast<std::uint64_t>(s);
       }},
      {"synthetic", [](auto& c, auto v) { c.synthetic = parse_bool(v, "synthetic"); }},
      {"bin", [](auto& c, auto v) { c.bin_us = parse_duration_us(v); }},
      {"tau", [](auto& c, auto v) { c.tau_us = parse_duration_us(v); }},
      {"lambda",
       [](auto& c, auto v) {
         if (v == "auto") {
           c.lambda.reset();
         } else {
           c.lambda = parse_real(v, "lambda");
         }
       }},
      {"channels", [](auto& c, auto v) { c.channels = static_cast<int>(parse_integer(v, "channels")); }},
      {"duration", [](auto& c, auto v) { c.duration_s = parse_real(v, "duration"); }},
      {"mean-rate", [](auto& c, auto v) { c.mean_rate_hz = parse_real(v, "mean-rate"); }},
  };
  return table;
}

void apply(ExperimentConfig& config, const std::string& key,
           std::string_view value) {
  const auto it = setters().find(key);
  if (it == setters().end()) {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
  it->second(config, value);
}

// ---------------------------------------------------------------------------
// Output staging: nothing reaches its final path until the command has
// finished computing.

class StagedOutputs {
public:
  fs::path stage(const fs::path& final_path) {
    if (final_path.empty()) {
      throw ConfigError("empty output path");
    }
    fs::path tmp = final_path;
    tmp += ".partial";
    staged_.emplace_back(tmp, final_path);
    return tmp;
  }

  // For files a writer placed next to a staged path on its own.
  void adopt(const fs::path& tmp, const fs::path& final_path) {
    staged_.emplace_back(tmp, final_path);
  }

  void commit() {
    for (const auto& [tmp, final_path] : staged_) {
      std::error_code ec;
      fs::rename(tmp, final_path, ec);
      if (ec) {
        throw IoError("cannot move output into place: " + final_path.string());
      }
    }
    staged_.clear();
  }

  ~StagedOutputs() {
    for (const auto& [tmp, final_path] : staged_) {
      std::error_code ec;
      fs::remove(tmp, ec);
    }
  }

private:
  std::vector<std::pair<fs::path, fs::path>> staged_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << text;
  if (!out) {
    throw IoError("write failed: " + path.string());
  }
}

std::string num(double v) {
  if (std::isinf(v)) {
    return v > 0 ? "inf" : "-inf";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

SampledSignal load_input(const ExperimentConfig& c) {
  if (c.input.empty()) {
    throw ConfigError("--in is required");
  }
  SampledSignal signal = load_signal(
      c.input, c.format == "raw" ? SignalFormat::raw_f32_le : SignalFormat::csv,
      c.rate_hz);
  if (signal.empty()) {
    throw ValidationError("input signal has no samples: " + c.input);
  }
  if (c.front_end) {
    signal = bandpass_front_end(signal, c.front_end_config);
  }
  return signal;
}

void echo_encoder(std::ostream& out, const EncoderSpec& spec) {
  out << "# encoder = " << to_string(spec.kind) << '\n';
  switch (spec.kind) {
  case EncoderKind::adm:
  case EncoderKind::adm_circuit:
    out << "# delta_on_v = " << num(spec.adm.delta_on_v) << '\n'
        << "# delta_off_v = " << num(spec.adm.delta_off_v) << '\n'
        << "# gain_a = " << num(spec.adm.gain_a) << '\n'
        << "# reset_delay_us = " << spec.adm.reset_delay_us << '\n'
        << "# refractory_us = " << spec.adm.refractory_us << '\n'
        << "# v_ref = " << num(spec.adm.v_ref) << '\n';
    break;
  case EncoderKind::rms_threshold:
    out << "# rms_multiplier = " << num(spec.threshold.k_or_level) << '\n'
        << "# dead_time_us = " << spec.threshold.refractory_us << '\n';
    break;
  case EncoderKind::absolute_threshold:
    out << "# level_v = " << num(spec.threshold.k_or_level) << '\n'
        << "# dead_time_us = " << spec.threshold.refractory_us << '\n';
    break;
  }
}

// ---------------------------------------------------------------------------
// Commands

int cmd_encode(const ExperimentConfig& c, std::ostream& out) {
  const EncoderSpec spec = c.encoder_spec(c.encoder);
  spec.validate();
  c.energy.validate();
  if (!c.vout.empty() && spec.kind != EncoderKind::adm &&
      spec.kind != EncoderKind::adm_circuit) {
    throw ConfigError("--vout needs an adm or adm-circuit encoder");
  }
  SampledSignal signal = load_input(c);
  bool degenerate = false;
  if (c.noise > 0.0) {
    auto noisy = inject_awgn(signal, c.noise, c.seed);
    degenerate = noisy.degenerate;
    signal = std::move(noisy.signal);
  }

  SpikeTrain train;
  std::optional<SampledSignal> trace;
  if (spec.kind == EncoderKind::adm_circuit || !c.vout.empty()) {
    auto circuit = adm_circuit_encode(signal, spec.adm);
    train = spec.kind == EncoderKind::adm ? adm_encode(signal, spec.adm)
                                          : std::move(circuit.train);
    trace = std::move(circuit.v_out);
  } else {
    train = spec.encode(signal);
  }
  const auto energy = energy_report(train, c.energy);

  StagedOutputs staged;
  if (!c.out.empty()) {
    save_spike_csv(staged.stage(c.out), train);
  }
  if (!c.vout.empty()) {
    save_signal_csv(staged.stage(c.vout), *trace);
  }
  staged.commit();

  out << "# admsim encode\n";
  echo_encoder(out, spec);
  out << "# front_end = " << (c.front_end ? "true" : "false") << '\n'
      << "# noise_multiplier = " << num(c.noise) << '\n'
      << "# seed = " << c.seed << '\n'
      << "# samples = " << signal.size() << '\n'
      << "# sample_rate_hz = " << num(signal.sample_rate_hz()) << '\n';
  if (degenerate) {
    out << "# warning = all-zero signal, no noise injected\n";
  }
  out << "events = " << train.size() << '\n'
      << "on_events = " << train.count(Polarity::on) << '\n'
      << "off_events = " << train.count(Polarity::off) << '\n'
      << "rate_hz = " << num(spike_rate(train)) << '\n'
      << "dynamic_energy_j = " << num(energy.dynamic_energy_j) << '\n'
      << "avg_power_w = " << num(energy.avg_power_w) << '\n';
  return kOk;
}

int cmd_sweep_snr(const ExperimentConfig& c, std::ostream& out) {
  std::vector<EncoderKind> kinds = c.encoders;
  if (kinds.empty()) {
    kinds = {EncoderKind::adm, EncoderKind::absolute_threshold};
  }
  std::vector<EncoderSpec> specs;
  for (auto k : kinds) {
    specs.push_back(c.encoder_spec(k));
    specs.back().validate();
  }
  const SampledSignal signal = load_input(c);
  const auto rows =
      robustness_sweep(signal, specs, c.multipliers, c.seed, c.tolerance_us);

  std::ostringstream csv;
  csv << "multiplier,snr_db,encoder,precision,recall,f1\n";
  for (const auto& r : rows) {
    csv << num(r.multiplier) << ',' << num(r.snr_db) << ','
        << to_string(r.encoder) << ',' << num(r.match.precision) << ','
        << num(r.match.recall) << ',' << num(r.match.f1) << '\n';
  }
  if (c.out.empty()) {
    out << csv.str();
    return kOk;
  }
  StagedOutputs staged;
  write_text(staged.stage(c.out), csv.str());
  staged.commit();
  out << "rows = " << rows.size() << '\n';
  return kOk;
}

int cmd_compare(const ExperimentConfig& c, std::ostream& out) {
  if (c.reference.empty() || c.candidate.empty()) {
    throw ConfigError("--reference and --candidate are required");
  }
  const SpikeTrain ref = load_spike_csv(c.reference);
  const SpikeTrain cand = load_spike_csv(c.candidate);
  const MatchReport report = match_spike_trains(ref, cand, c.tolerance_us);
  const std::string json = report.to_json();
  if (!c.out.empty()) {
    StagedOutputs staged;
    write_text(staged.stage(c.out), json + "\n");
    staged.commit();
  }
  out << json << '\n';
  return kOk;
}

int cmd_aer_pack(const ExperimentConfig& c, std::ostream& out) {
  if (c.trains.empty()) {
    throw ConfigError("--train channel=path is required at least once");
  }
  if (c.out.empty()) {
    throw ConfigError("--out is required");
  }
  std::vector<ChannelTrain> trains;
  AerSidecar meta;
  std::int64_t duration = 0;
  for (const auto& [ch, path] : c.trains) {
    trains.push_back({ch, load_spike_csv(path)});
    duration = std::max(duration, trains.back().train.duration_us);
    meta.channel_labels[ch] = fs::path(path).filename().string();
  }
  AerStream stream = merge_channels(trains);
  std::uint64_t max_latency = 0;
  if (c.service_time_us) {
    auto arb = arbiter_simulate(stream, *c.service_time_us);
    stream = std::move(arb.egress);
    max_latency = arb.max_latency_us;
    meta.service_time_us = c.service_time_us;
    if (!stream.empty()) {
      duration = std::max<std::int64_t>(
          duration, static_cast<std::int64_t>(stream.events.back().timestamp_us) + 1);
    }
  }
  if (c.rate_hz > 0.0) {
    meta.sample_rate_hz = c.rate_hz;
  }
  meta.duration_us = duration;

  StagedOutputs staged;
  const fs::path tmp = staged.stage(c.out);
  staged.adopt(sidecar_path(tmp), sidecar_path(c.out));
  write_aer_file(tmp, stream, meta);
  staged.commit();

  out << "events = " << stream.size() << '\n'
      << "channels = " << trains.size() << '\n'
      << "max_latency_us = " << max_latency << '\n';
  return kOk;
}

int cmd_aer_unpack(const ExperimentConfig& c, std::ostream& out) {
  if (c.input.empty() || c.out.empty()) {
    throw ConfigError("--in and --out are required");
  }
  const AerStream stream = read_aer_file(c.input);
  const AerSidecar meta = read_aer_sidecar(c.input);
  std::int64_t duration = 0;
  if (meta.duration_us) {
    duration = *meta.duration_us;
  } else {
    for (const auto& e : stream.events) {
      duration = std::max(duration, static_cast<std::int64_t>(e.timestamp_us) + 1);
    }
  }
  const SpikeTrain train = extract_channel(stream, c.channel, duration);
  StagedOutputs staged;
  save_spike_csv(staged.stage(c.out), train);
  staged.commit();
  out << "events = " << train.size() << '\n';
  return kOk;
}

DecodeOptions decode_options(const ExperimentConfig& c) {
  DecodeOptions o;
  o.bin_width_us = c.bin_us;
  o.tau_us = c.tau_us;
  if (c.lambda) {
    o.lambda_grid = {*c.lambda};
  }
  return o;
}

nlohmann::ordered_json decode_entry(std::string_view name, const DecodeResult& r,
                                    std::size_t events, double energy_j) {
  nlohmann::ordered_json j;
  j["encoder"] = name;
  j["rho_x"] = r.test.rho_x;
  j["rho_y"] = r.test.rho_y;
  j["rho_avg"] = r.test.rho_avg;
  j["train_rho_avg"] = r.train.rho_avg;
  j["lambda"] = r.lambda;
  j["events"] = events;
  j["energy_j"] = energy_j;
  return j;
}

int cmd_decode(const ExperimentConfig& c, std::ostream& out) {
  c.energy.validate();
  const DecodeOptions options = decode_options(c);
  nlohmann::ordered_json report;
  report["bin_width_us"] = options.bin_width_us;
  report["tau_us"] = options.tau_us;
  report["encoders"] = nlohmann::ordered_json::array();

  if (c.synthetic) {
    SyntheticDecodeConfig sc;
    sc.decode = options;
    sc.population.seed = c.seed;
    if (c.channels) {
      sc.population.channels = *c.channels;
    }
    if (c.duration_s) {
      sc.kinematics.duration_s = *c.duration_s;
    }
    std::vector<EncoderKind> kinds = c.encoders;
    if (kinds.empty()) {
      kinds = {EncoderKind::adm, EncoderKind::rms_threshold,
               EncoderKind::absolute_threshold};
    }
    std::vector<EncoderSpec> specs;
    for (auto k : kinds) {
      specs.push_back(c.encoder_spec(k));
    }
    report["source"] = "synthetic";
    report["seed"] = c.seed;
    report["channels"] = sc.population.channels;
    for (const auto& r : run_synthetic_decoding(sc, specs, c.energy)) {
      report["encoders"].push_back(
          decode_entry(to_string(r.encoder), r.result, r.events, r.energy_j));
    }
  } else {
    if (c.kinematics.empty()) {
      throw ConfigError("--kinematics is required unless --synthetic is set");
    }
    if (c.aer.empty() == c.spikes.empty()) {
      throw ConfigError("give exactly one of --aer or --spikes");
    }
    const KinematicsSeries kin = load_kinematics_csv(c.kinematics);
    BinnedCounts counts;
    std::size_t events = 0;
    if (!c.aer.empty()) {
      const AerStream stream = read_aer_file(c.aer);
      const AerSidecar meta = read_aer_sidecar(c.aer);
      int channels = c.channels.value_or(0);
      if (channels == 0) {
        for (const auto& e : stream.events) {
          channels = std::max(channels, static_cast<int>(e.channel) + 1);
        }
        for (const auto& [ch, label] : meta.channel_labels) {
          channels = std::max(channels, ch + 1);
        }
      }
      const std::int64_t span = meta.duration_us.value_or(kin.t_us.back());
      counts = bin_spikes(stream, channels, options.bin_width_us, span);
      events = stream.size();
      report["source"] = c.aer;
    } else {
      const SpikeTrain train = load_spike_csv(c.spikes);
      const std::int64_t span = std::max(train.duration_us, kin.t_us.back());
      counts = bin_spikes(train, options.bin_width_us, span);
      events = train.size();
      report["source"] = c.spikes;
    }
    const DecodeResult r = run_decoding(counts, kin, options);
    report["encoders"].push_back(decode_entry(
        "input", r, events,
        static_cast<double>(events) * c.energy.energy_per_spike_j));
  }

  const std::string text = report.dump(2) + "\n";
  if (!c.out.empty()) {
    StagedOutputs staged;
    write_text(staged.stage(c.out), text);
    staged.commit();
  }
  out << text;
  return kOk;
}

int cmd_synth(const ExperimentConfig& c, std::ostream& out) {
  if (c.out.empty()) {
    throw ConfigError("--out is required");
  }
  synth::ActionPotentialConfig ac;
  ac.seed = c.seed;
  ac.mean_rate_hz = c.mean_rate_hz;
  if (c.rate_hz > 0.0) {
    ac.sample_rate_hz = c.rate_hz;
  }
  if (c.duration_s) {
    ac.duration_s = *c.duration_s;
  }
  const auto rec = synth::make_action_potential_train(ac);
  StagedOutputs staged;
  save_signal_csv(staged.stage(c.out), rec.signal);
  if (!c.kinematics.empty()) {
    synth::KinematicsConfig kc;
    kc.duration_s = ac.duration_s;
    save_kinematics_csv(staged.stage(c.kinematics),
                        synth::make_velocity_kinematics(kc));
  }
  staged.commit();
  out << "samples = " << rec.signal.size() << '\n'
      << "pulses = " << rec.pulse_onsets_us.size() << '\n'
      << "median_abs_v = " << num(median_abs(rec.signal.samples())) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

struct Command {
  CLI::App* app;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  std::function<int(const ExperimentConfig&, std::ostream&)> run;
};

void add_keys(Command& cmd, std::map<std::string, std::string>& values,
              std::map<std::string, std::vector<std::string>>& lists,
              std::initializer_list<std::pair<const char*, const char*>> keys) {
  for (const auto& [key, help] : keys) {
    const std::string k = key;
    CLI::Option* opt = nullptr;
    if (k == "front-end" || k == "synthetic") {
      opt = cmd.app->add_flag("--" + k, help);
    } else if (k == "train") {
      opt = cmd.app->add_option("--" + k, lists[k], help);
    } else {
      opt = cmd.app->add_option("--" + k, values[k], help);
    }
    cmd.options.emplace_back(k, opt);
  }
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Asynchronous delta-modulation spike encoding toolkit", "admsim"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key = value config file (flags override)");

  std::map<std::string, std::string> values;
  std::map<std::string, std::vector<std::string>> lists;
  std::vector<Command> commands;

  const std::initializer_list<std::pair<const char*, const char*>> input_keys = {
      {"in", "input signal file"},
      {"format", "csv or raw (float32 little-endian)"},
      {"rate", "sample rate in Hz (single-column CSV and raw)"},
      {"front-end", "pass the input through the band-limited front end"},
      {"fe-gain-db", "front-end mid-band gain, dB"},
      {"fe-low", "front-end low corner, Hz"},
      {"fe-high", "front-end high corner, Hz"},
  };
  const std::initializer_list<std::pair<const char*, const char*>> encoder_keys = {
      {"delta", "symmetric ADM threshold, e.g. 150mV"},
      {"delta-on", "ADM upward threshold"},
      {"delta-off", "ADM downward threshold magnitude"},
      {"gain", "differencing amplifier gain A"},
      {"reset-delay", "ADM reset delay, e.g. 0.1ms"},
      {"refractory", "ADM refractory period, e.g. 1ms"},
      {"v-ref", "amplifier reference voltage"},
      {"k", "rms-multiplier threshold factor"},
      {"level", "absolute threshold level, e.g. -110mV"},
      {"dead-time", "threshold-encoder dead time"},
  };
  const std::initializer_list<std::pair<const char*, const char*>> energy_keys = {
      {"energy-per-spike", "joules per event"},
      {"dynamic-power", "reference dynamic power, W"},
      {"supply", "supply voltage"},
  };

  auto make = [&](const char* name, const char* help, auto fn) -> Command& {
    commands.push_back({app.add_subcommand(name, help), {}, fn});
    return commands.back();
  };
  commands.reserve(7);

  {
    auto& c = make("encode", "encode a signal into a spike train", cmd_encode);
    add_keys(c, values, lists, input_keys);
    add_keys(c, values, lists, encoder_keys);
    add_keys(c, values, lists, energy_keys);
    add_keys(c, values, lists,
             {{"encoder", "adm, adm-circuit, rms or abs"},
              {"noise", "noise level as a multiple of median |x|"},
              {"seed", "noise seed"},
              {"out", "spike train CSV"},
              {"vout", "amplifier output trace CSV"}});
  }
  {
    auto& c = make("sweep-snr", "noise-robustness sweep", cmd_sweep_snr);
    add_keys(c, values, lists, input_keys);
    add_keys(c, values, lists, encoder_keys);
    add_keys(c, values, lists,
             {{"encoders", "comma-separated encoders (default adm,abs)"},
              {"multipliers", "noise levels, e.g. 1,1.5,2,4"},
              {"seed", "noise seed"},
              {"tolerance", "match window, e.g. 500us"},
              {"out", "CSV output (stdout when absent)"}});
  }
  {
    auto& c = make("compare", "score a candidate train against a reference", cmd_compare);
    add_keys(c, values, lists,
             {{"reference", "reference spike CSV"},
              {"candidate", "candidate spike CSV"},
              {"tolerance", "match window, e.g. 500us"},
              {"out", "JSON output"}});
  }
  {
    auto& c = make("aer-pack", "merge per-channel trains into an .aer file", cmd_aer_pack);
    add_keys(c, values, lists,
             {{"train", "channel=path, repeatable"},
              {"service-time", "arbiter service time, e.g. 1us"},
              {"rate", "sample rate recorded in the sidecar"},
              {"out", ".aer output"}});
  }
  {
    auto& c = make("aer-unpack", "extract one channel from an .aer file", cmd_aer_unpack);
    add_keys(c, values, lists,
             {{"in", ".aer input"}, {"channel", "channel id"}, {"out", "spike CSV"}});
  }
  {
    auto& c = make("decode", "velocity decoding from spikes", cmd_decode);
    add_keys(c, values, lists, encoder_keys);
    add_keys(c, values, lists, energy_keys);
    add_keys(c, values, lists,
             {{"synthetic", "generate a tuned population and compare encoders"},
              {"encoders", "encoders for --synthetic (default adm,rms,abs)"},
              {"aer", ".aer input"},
              {"spikes", "single spike CSV input"},
              {"kinematics", "time_s,vx,vy CSV"},
              {"channels", "channel count"},
              {"bin", "bin width, e.g. 20ms"},
              {"tau", "feature time constant, e.g. 100ms"},
              {"lambda", "ridge strength or auto"},
              {"duration", "synthetic duration, s"},
              {"seed", "synthetic seed"},
              {"out", "JSON report"}});
  }
  {
    auto& c = make("synth", "write a synthetic action-potential recording", cmd_synth);
    add_keys(c, values, lists,
             {{"out", "signal CSV"},
              {"kinematics", "also write matching velocity kinematics CSV"},
              {"duration", "seconds"},
              {"rate", "sample rate, Hz"},
              {"mean-rate", "mean pulse rate, Hz"},
              {"seed", "random seed"}});
  }

  std::vector<const char*> argv;
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }

  try {
    for (const auto& cmd : commands) {
      if (!cmd.app->parsed()) {
        continue;
      }
      ExperimentConfig config;
      if (!config_path.empty()) {
        for (const auto& [key, value] : read_kv_file(config_path)) {
          apply(config, key, value);
        }
      }
      for (const auto& [key, opt] : cmd.options) {
        if (opt->count() == 0) {
          continue;
        }
        if (key == "front-end" || key == "synthetic") {
          apply(config, key, "true");
        } else if (key == "train") {
          std::string joined;
          for (const auto& t : lists[key]) {
            joined += (joined.empty() ? "" : ",") + t;
          }
          apply(config, key, joined);
        } else {
          apply(config, key, values[key]);
        }
      }
      return cmd.run(config, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.category()) {
    case Error::Category::io:
      return kIo;
    case Error::Category::numerical:
      return kNumerical;
    case Error::Category::validation:
      return kValidation;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }
  return kValidation;
}

} // namespace admsim::cli
