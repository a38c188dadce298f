// Acceptance suite: one PASS/FAIL line per criterion; nonzero exit if any
// criterion fails.

#include <admsim/aer.hpp>
#include <admsim/decode.hpp>
#include <admsim/encode.hpp>
#include <admsim/experiments.hpp>
#include <admsim/metrics.hpp>
#include <admsim/signal.hpp>
#include <admsim/synth.hpp>

#include "cli.hpp"
#include "oracles.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace admsim;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;

void criterion(int id, const char* title, double budget_s,
               const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0.0 && secs > budget_s) {
    o.pass = false;
    o.detail += " [over time budget]";
  }
  g_failures += o.pass ? 0 : 1;
  std::printf("AC%-2d %s  %s: %s (%.2f s)\n", id, o.pass ? "PASS" : "FAIL", title,
              o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double db(double g) { return 20.0 * std::log10(g); }

// ---------------------------------------------------------------------------

Outcome ac1() {
  const EnergyModel m;
  const double rate = m.break_even_rate_hz();
  // same number through energy_report: 200 events in 1 s
  SpikeTrain t;
  t.duration_us = 1000000;
  for (int i = 0; i < 200; ++i) {
    t.events.push_back({i * 5000, Polarity::on});
  }
  const double p = energy_report(t, m).avg_power_w;
  const bool ok = std::fabs(rate - 200.0) <= 0.1 &&
                  std::fabs(p - m.dynamic_power_w) <= 1e-4 * m.dynamic_power_w;
  return {ok, fmt("break-even rate %.4f spikes/s, 200 spikes/s -> %.4f uW", rate, p * 1e6)};
}

Outcome ac2() {
  std::vector<double> x(2001);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double mag = i < 600 ? 0.002 : i < 1400 ? 0.02284 : 0.21;
    x[i] = (i % 2 ? -mag : mag);
  }
  const SampledSignal s(x, 30000.0);
  const double med = median_abs(s.samples());
  const double s1 = inject_awgn(s, 1.0, 1).sigma_v;
  const double s4 = inject_awgn(s, 4.0, 1).sigma_v;
  const double p1 = 100.0 * s1 / 0.220, p4 = 100.0 * s4 / 0.220;
  const bool ok = std::fabs(s1 - 0.02284) < 1e-9 && std::fabs(s4 - 0.09136) < 1e-9 &&
                  std::fabs(p1 - 10.4) <= 0.2 && std::fabs(p4 - 41.5) <= 0.2;
  return {ok, fmt("median|x| %.2f mV, sigma %.2f / %.2f mV = %.2f%% / %.2f%% of 220 mV",
                  med * 1e3, s1 * 1e3, s4 * 1e3, p1, p4)};
}

Outcome ac3() {
  const FrontEndConfig cfg;
  const double fs = 30000.0;
  const double mid = db(measure_sinusoid_gain(cfg, fs, std::sqrt(cfg.f_low_hz * cfg.f_high_hz)));
  const double lo = db(measure_sinusoid_gain(cfg, fs, cfg.f_low_hz));
  const double hi = db(measure_sinusoid_gain(cfg, fs, cfg.f_high_hz));
  const bool ok = std::fabs(mid - 12.14) <= 0.1 && std::fabs(lo - (mid - 3.0)) <= 0.1 &&
                  std::fabs(hi - (mid - 3.0)) <= 0.1;
  return {ok, fmt("mid-band %.3f dB, 80 Hz %.3f dB, 8 kHz %.3f dB", mid, lo, hi)};
}

Outcome ac4() {
  // The event instant snaps to a sample, so each inter-event interval is
  // ceil(delta / step) samples for a per-sample step s / fs. Over n samples
  // that drifts from s T / delta by up to n / r^2 events (r = delta / step),
  // so delta is drawn with r above sqrt(n).
  std::mt19937_64 rng(2024);
  const double fs = 30000.0, T = 1.0;
  const double r_min = 1.05 * std::sqrt(T * fs);
  std::uniform_real_distribution<double> slope(0.2, 20.0), ratio(r_min, 10.0 * r_min);
  int worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const double s = slope(rng);
    const double d = ratio(rng) * s / fs;
    std::vector<double> x(static_cast<std::size_t>(T * fs) + 1);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = s * static_cast<double>(i) / fs;
    }
    AdmConfig c;
    c.delta_on_v = c.delta_off_v = d;
    c.reset_delay_us = c.refractory_us = 0;
    const auto t = adm_encode(SampledSignal(x, fs), c);
    const auto want = static_cast<long>(std::floor(s * T / d));
    const long got = static_cast<long>(t.count(Polarity::on));
    worst = std::max(worst, static_cast<int>(std::labs(got - want)));
    if (t.count(Polarity::off) != 0) {
      return {false, "OFF events on a rising ramp"};
    }
  }
  return {worst <= 1, fmt("20 ramps, max |count - floor(sT/delta)| = %d", worst)};
}

Outcome ac5() {
  std::mt19937_64 rng(5150);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double fs = 30000.0;
  int mismatches = 0;
  std::size_t events = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(30000);
    const double noise = 0.005 + 0.05 * u(rng);
    double level = 0.0, slope = 0.0;
    for (auto& v : x) {
      if (u(rng) < 3e-4) {
        level += (u(rng) - 0.5);
      }
      if (u(rng) < 2e-4) {
        slope = (u(rng) - 0.5) * 2e-4;
      }
      level += slope;
      v = level + noise * g(rng);
    }
    AdmConfig c;
    c.delta_on_v = 0.01 + 0.2 * u(rng);
    c.delta_off_v = 0.01 + 0.2 * u(rng);
    c.gain_a = 1.0 + 9.0 * u(rng);
    if (trial % 5 == 0) {
      c.reset_delay_us = c.refractory_us = 0;
    }
    const SampledSignal s(x, fs);
    const auto a = adm_encode(s, c);
    const auto b = adm_circuit_encode(s, c).train;
    mismatches += a == b ? 0 : 1;
    events += a.size();
  }
  return {mismatches == 0,
          fmt("100 signals, %zu events, %d mismatching sequences", events, mismatches)};
}

Outcome ac6() {
  // Polarities are matched independently, so the exhaustive sweep runs over
  // one polarity: every pair of subsets of 10 slots with <= 5 events.
  const int slots = 10;
  const std::int64_t step = 100;
  std::vector<unsigned> masks;
  for (unsigned m = 0; m < (1u << slots); ++m) {
    if (std::popcount(m) <= 5) {
      masks.push_back(m);
    }
  }
  std::vector<SpikeTrain> trains;
  for (unsigned m : masks) {
    trains.push_back(oracle::mask_train(m, slots, step));
  }
  std::size_t instances = 0, bad = 0;
  for (std::int64_t tol : {std::int64_t{0}, step, 3 * step / 2, 5 * step / 2}) {
    for (const auto& ref : trains) {
      for (const auto& cand : trains) {
        ++instances;
        bad += match_spike_trains(ref, cand, tol).tp != oracle::optimal_tp(ref, cand, tol);
      }
    }
  }
  // Mixed polarities, up to 10 events per polarity.
  std::mt19937_64 rng(66);
  std::size_t random_bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto ref = oracle::random_train(rng, 25, 40, 10);
    const auto cand = oracle::random_train(rng, 25, 40, 10);
    const auto tol = static_cast<std::int64_t>(rng() % 160);
    random_bad += match_spike_trains(ref, cand, tol).tp != oracle::optimal_tp(ref, cand, tol);
  }
  return {bad == 0 && random_bad == 0,
          fmt("%zu exhaustive instances (%zu differ), 1000 random (%zu differ)", instances,
              bad, random_bad)};
}

Outcome ac7() {
  synth::ActionPotentialConfig ap; // 30 kHz, 220 mV biphasic 1 ms pulses
  const auto rec = synth::make_action_potential_train(ap);
  const std::vector<EncoderSpec> encoders = {
      EncoderSpec::make(EncoderKind::adm),
      EncoderSpec::make(EncoderKind::absolute_threshold)};

  // Defaults are tuned for near-perfect clean detection of the pulses.
  SpikeTrain truth;
  truth.duration_us = rec.signal.end_us();
  for (auto t : rec.pulse_onsets_us) {
    truth.events.push_back({t, Polarity::off});
  }
  std::string detail;
  bool ok = true;
  for (const auto& e : encoders) {
    const double f1 = match_spike_trains(truth, e.encode(rec.signal)).f1;
    detail += fmt("clean %s F1 %.3f; ", std::string(to_string(e.kind)).c_str(), f1);
    ok = ok && f1 >= 0.99;
  }

  const std::vector<double> multipliers = {0.0, 1.0, 1.5, 2.0, 4.0};
  const auto rows = robustness_sweep(rec.signal, encoders, multipliers, 1,
                                     kDefaultMatchToleranceUs);
  double adm_base = 0, abs_base = 0, adm_last = 0, abs_last = 0;
  for (std::size_t k = 0; k < multipliers.size(); ++k) {
    const double fa = rows[2 * k].match.f1, fb = rows[2 * k + 1].match.f1;
    if (k == 0) {
      adm_base = fa;
      abs_base = fb;
      continue;
    }
    detail += fmt("%gx (%.1f dB) adm %.3f abs %.3f; ", multipliers[k], rows[2 * k].snr_db, fa, fb);
    ok = ok && fa >= fb;
    adm_last = fa;
    abs_last = fb;
  }
  const double adm_drop = adm_base - adm_last, abs_drop = abs_base - abs_last;
  detail += fmt("drop at 4x adm %.3f abs %.3f", adm_drop, abs_drop);
  ok = ok && abs_drop > adm_drop;
  return {ok, detail};
}

Outcome ac8() {
  std::mt19937_64 rng(88);
  AerStream s;
  std::uniform_int_distribution<std::uint64_t> t(0, kAerMaxTimestampUs);
  for (int i = 0; i < 100000; ++i) {
    s.events.push_back({t(rng), static_cast<std::uint16_t>(rng() % (kAerMaxChannel + 1)),
                        rng() % 2 ? Polarity::on : Polarity::off});
  }
  std::sort(s.events.begin(), s.events.end(), [](const auto& a, const auto& b) {
    return a.timestamp_us != b.timestamp_us ? a.timestamp_us < b.timestamp_us
                                            : a.channel < b.channel;
  });
  const auto bytes = serialize(s);
  const bool round_trip = deserialize(bytes) == s && serialize(deserialize(bytes)) == bytes;

  // 16 channels on a coarse grid so equal timestamps are common.
  std::vector<ChannelTrain> trains;
  std::size_t total = 0;
  for (int ch = 0; ch < 16; ++ch) {
    trains.push_back({ch, oracle::random_train(rng, 200, 50, 60)});
    total += trains.back().train.size();
  }
  std::shuffle(trains.begin(), trains.end(), rng);
  const auto merged = merge_channels(trains);
  bool merge_ok = merged.size() == total;
  for (std::size_t i = 1; i < merged.size() && merge_ok; ++i) {
    const auto& a = merged.events[i - 1];
    const auto& b = merged.events[i];
    merge_ok = a.timestamp_us < b.timestamp_us ||
               (a.timestamp_us == b.timestamp_us && a.channel <= b.channel);
  }
  for (const auto& ct : trains) {
    merge_ok = merge_ok && extract_channel(merged, ct.channel, ct.train.duration_us) == ct.train;
  }

  bool burst_ok = true;
  for (std::uint64_t n : {2u, 10u, 100u}) {
    const std::uint64_t svc = 3;
    AerStream burst;
    for (std::uint64_t k = 0; k < n; ++k) {
      burst.events.push_back({500, static_cast<std::uint16_t>(k), Polarity::on});
    }
    burst_ok = burst_ok && arbiter_simulate(burst, svc).max_latency_us == (n - 1) * svc;
  }
  return {round_trip && merge_ok && burst_ok,
          fmt("round trip %s on 1e5 events, 16-channel merge %s, burst latency %s",
              round_trip ? "exact" : "BROKEN", merge_ok ? "stable+sorted" : "BROKEN",
              burst_ok ? "(N-1)s" : "WRONG")};
}

Outcome ac9() {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g;
  Eigen::MatrixXd f(500, 8), w(8, 2);
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    f.data()[i] = g(rng);
  }
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    w.data()[i] = g(rng);
  }
  const Eigen::MatrixXd y = f * w;
  const double exact = evaluate_decoding(fit_readout(f, y, 0.0), f, y).rho_avg;

  SyntheticDecodeConfig cfg; // documented defaults
  const std::vector<EncoderSpec> encoders = {
      EncoderSpec::make(EncoderKind::adm), EncoderSpec::make(EncoderKind::rms_threshold),
      EncoderSpec::make(EncoderKind::absolute_threshold)};
  const auto reports = run_synthetic_decoding(cfg, encoders);
  std::string detail = fmt("exact-linear training rho %.9f; ", exact);
  double adm_rho = 0.0;
  for (const auto& r : reports) {
    detail += fmt("%s test rho %.3f (%zu events); ",
                  std::string(to_string(r.encoder)).c_str(), r.result.test.rho_avg, r.events);
    if (r.encoder == EncoderKind::adm) {
      adm_rho = r.result.test.rho_avg;
    }
  }
  return {std::fabs(exact - 1.0) <= 1e-6 && adm_rho >= 0.9, detail};
}

// Every command twice with identical inputs; outputs and reports must match
// byte for byte.
Outcome ac10() {
  oracle::TempDir dir("acc");
  auto run = [](std::vector<std::string> args, std::string& out) {
    args.insert(args.begin(), "admsim");
    std::ostringstream o, e;
    const int rc = cli::run(args, o, e);
    out = o.str();
    if (rc != 0) {
      throw std::runtime_error("command failed: " + args[1] + ": " + e.str());
    }
  };
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };

  std::string scratch;
  run({"synth", "--out", dir / "sig.csv", "--kinematics", dir / "kin.csv", "--duration", "2",
       "--seed", "4"},
      scratch);
  run({"encode", "--in", dir / "sig.csv", "--out", dir / "ref.csv"}, scratch);

  struct Case {
    std::string name;
    std::function<std::vector<std::string>(const std::string&)> args;
    std::vector<std::string> outputs; // suffixes appended to the run tag
  };
  const std::string d = dir.path().string() + "/";
  const std::vector<Case> cases = {
      {"synth", [&](const std::string& r) {
         return std::vector<std::string>{"synth", "--out", d + r + ".csv", "--kinematics",
                                         d + r + ".kin.csv", "--duration", "1", "--seed", "8"};
       }, {".csv", ".kin.csv"}},
      {"encode", [&](const std::string& r) {
         return std::vector<std::string>{"encode", "--in", d + "sig.csv", "--encoder", "adm-circuit",
                                         "--noise", "2", "--seed", "5", "--out", d + r + ".csv",
                                         "--vout", d + r + ".vout.csv"};
       }, {".csv", ".vout.csv"}},
      {"sweep-snr", [&](const std::string& r) {
         return std::vector<std::string>{"sweep-snr", "--in", d + "sig.csv", "--encoders",
                                         "adm,rms,abs", "--seed", "6", "--out", d + r + ".csv"};
       }, {".csv"}},
      {"compare", [&](const std::string& r) {
         return std::vector<std::string>{"compare", "--reference", d + "ref.csv", "--candidate",
                                         d + "ref.csv", "--out", d + r + ".json"};
       }, {".json"}},
      {"aer-pack", [&](const std::string& r) {
         return std::vector<std::string>{"aer-pack", "--train", "0=" + d + "ref.csv", "--train",
                                         "1=" + d + "ref.csv", "--service-time", "5us", "--out",
                                         d + r + ".aer"};
       }, {".aer", ".aer.meta"}},
      {"aer-unpack", [&](const std::string& r) {
         return std::vector<std::string>{"aer-unpack", "--in", d + "aer-pack.a.aer", "--channel",
                                         "1", "--out", d + r + ".csv"};
       }, {".csv"}},
      {"decode", [&](const std::string& r) {
         return std::vector<std::string>{"decode", "--spikes", d + "ref.csv", "--kinematics",
                                         d + "kin.csv", "--out", d + r + ".json"};
       }, {".json"}},
      {"decode --synthetic", [&](const std::string& r) {
         return std::vector<std::string>{"decode", "--synthetic", "--duration", "20", "--channels",
                                         "8", "--seed", "2", "--out", d + r + ".json"};
       }, {".json"}},
  };

  std::string detail;
  bool ok = true;
  for (const auto& c : cases) {
    const std::string tag = c.name.substr(0, c.name.find(' '));
    const std::string ta = tag + (c.name.find(' ') == std::string::npos ? "" : "-syn") + ".a";
    const std::string tb = tag + (c.name.find(' ') == std::string::npos ? "" : "-syn") + ".b";
    std::string out_a, out_b;
    run(c.args(ta), out_a);
    run(c.args(tb), out_b);
    bool same = out_a == out_b;
    for (const auto& suffix : c.outputs) {
      const std::string fa = slurp(d + ta + suffix), fb = slurp(d + tb + suffix);
      same = same && !fa.empty() && fa == fb;
    }
    detail += c.name + (same ? " ok; " : " DIFFERS; ");
    ok = ok && same;
  }
  return {ok, detail};
}

} // namespace

int main() {
  criterion(1, "energy constants", 1.0, ac1);
  criterion(2, "noise-level arithmetic", 1.0, ac2);
  criterion(3, "front-end response", 10.0, ac3);
  criterion(4, "ADM ramp law", 5.0, ac4);
  criterion(5, "model equivalence", 30.0, ac5);
  criterion(6, "matching oracle", 60.0, ac6);
  criterion(7, "robustness trend", 60.0, ac7);
  criterion(8, "AER", 10.0, ac8);
  criterion(9, "decoding harness", 60.0, ac9);
  criterion(10, "CLI determinism", 0.0, ac10);
  std::printf("%d of 10 criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
