#pragma once

#include <admsim/spike_train.hpp>

#include <cstdint>
#include <span>
#include <string>

namespace admsim {

/// Tolerance-windowed comparison of a candidate train against a reference.
struct MatchReport {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn_ = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t tolerance_us = 0;

  /// Fills precision/recall/f1 from the counts. Empty denominators score 1
  /// when nothing was missed and 0 otherwise.
  void finalize();

  /// Single-line JSON with keys tp, fp, fn, precision, recall, f1,
  /// tolerance_us.
  std::string to_json() const;
};

inline constexpr std::int64_t kDefaultMatchToleranceUs = 500;

/// Per-polarity chronological matching: each candidate, in time order, takes
/// the earliest still-unmatched reference event of the same polarity inside
/// [t - tolerance, t + tolerance]. Because windows slide monotonically this
/// yields a maximum matching. Throws ValidationError on unsorted input.
MatchReport match_spike_trains(const SpikeTrain& reference,
                               const SpikeTrain& candidate,
                               std::int64_t tolerance_us = kDefaultMatchToleranceUs);

/// Sample Pearson correlation. Throws ValidationError on length mismatch or
/// fewer than two points, DomainError on zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

/// Events per second over [0, duration_us).
double spike_rate(const SpikeTrain& train);

struct EnergyModel {
  double energy_per_spike_j = 60.7281e-9;
  double dynamic_power_w = 12.145e-6;
  double supply_v = 1.2;

  void validate() const;
  /// Event rate at which count * energy_per_spike reaches dynamic_power_w.
  double break_even_rate_hz() const { return dynamic_power_w / energy_per_spike_j; }
};

struct EnergyReport {
  double dynamic_energy_j = 0.0;
  double avg_power_w = 0.0;
};

/// Dynamic energy of the events and its average over the train duration.
/// Static power is not modeled.
EnergyReport energy_report(const SpikeTrain& train, const EnergyModel& model = {});

} // namespace admsim
