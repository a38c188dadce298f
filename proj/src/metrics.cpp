#include <admsim/metrics.hpp>

#include <admsim/error.hpp>
#include <admsim/simd/kernels.hpp>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>

namespace admsim {

void MatchReport::finalize() {
  if (tp + fp == 0) {
    precision = fn_ == 0 ? 1.0 : 0.0;
  } else {
    precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  if (tp + fn_ == 0) {
    recall = fp == 0 ? 1.0 : 0.0;
  } else {
    recall = static_cast<double>(tp) / static_cast<double>(tp + fn_);
  }
  f1 = precision + recall > 0.0
           ? 2.0 * precision * recall / (precision + recall)
           : 0.0;
}

std::string MatchReport::to_json() const {
  nlohmann::ordered_json j;
  j["tp"] = tp;
  j["fp"] = fp;
  j["fn"] = fn_;
  j["precision"] = precision;
  j["recall"] = recall;
  j["f1"] = f1;
  j["tolerance_us"] = tolerance_us;
  return j.dump();
}

MatchReport match_spike_trains(const SpikeTrain& reference,
                               const SpikeTrain& candidate,
                               std::int64_t tolerance_us) {
  if (tolerance_us < 0) {
    throw ValidationError("match tolerance must be >= 0");
  }
  reference.validate();
  candidate.validate();

  MatchReport report;
  report.tolerance_us = tolerance_us;
  for (Polarity p : {Polarity::off, Polarity::on}) {
    const auto ref = reference.timestamps(p);
    const auto cand = candidate.timestamps(p);
    std::size_t next_ref = 0;
    for (const std::int64_t t : cand) {
      while (next_ref < ref.size() && ref[next_ref] < t - tolerance_us) {
        ++next_ref; // expired: no later candidate can reach it
      }
      if (next_ref < ref.size() && ref[next_ref] <= t + tolerance_us) {
        ++report.tp;
        ++next_ref;
      } else {
        ++report.fp;
      }
    }
  }
  report.fn_ = reference.size() - report.tp;
  report.finalize();
  return report;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ValidationError("pearson: sequences differ in length");
  }
  if (x.size() < 2) {
    throw ValidationError("pearson: need at least two points");
  }
  const double n = static_cast<double>(x.size());
  const double mx = simd::sum(x) / n;
  const double my = simd::sum(y) / n;
  const auto m = simd::centered_moments(x, y, mx, my);
  if (!(m.sxx > 0.0) || !(m.syy > 0.0)) {
    throw DomainError("pearson: zero-variance input");
  }
  const double r = m.sxy / std::sqrt(m.sxx * m.syy);
  return std::clamp(r, -1.0, 1.0);
}

double spike_rate(const SpikeTrain& train) {
  if (train.duration_us <= 0) {
    throw DomainError("spike rate of a zero-duration train");
  }
  return static_cast<double>(train.size()) * 1e6 /
         static_cast<double>(train.duration_us);
}

void EnergyModel::validate() const {
  if (!(energy_per_spike_j > 0.0) || !(dynamic_power_w > 0.0) ||
      !(supply_v > 0.0)) {
    throw ConfigError("energy model parameters must be positive");
  }
}

EnergyReport energy_report(const SpikeTrain& train, const EnergyModel& model) {
  model.validate();
  if (train.duration_us <= 0) {
    throw DomainError("energy report of a zero-duration train");
  }
  EnergyReport r;
  r.dynamic_energy_j = static_cast<double>(train.size()) * model.energy_per_spike_j;
  r.avg_power_w = r.dynamic_energy_j * 1e6 / static_cast<double>(train.duration_us);
  return r;
}

} // namespace admsim
