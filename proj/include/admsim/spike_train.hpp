#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

namespace admsim {

enum class Polarity : std::uint8_t { off = 0, on = 1 };

std::string_view to_string(Polarity p) noexcept;

struct SpikeEvent {
  std::int64_t timestamp_us = 0;
  Polarity polarity = Polarity::on;

  friend bool operator==(const SpikeEvent&, const SpikeEvent&) = default;
};

/// ON/OFF events of one channel, sorted by timestamp, covering
/// [0, duration_us).
struct SpikeTrain {
  std::vector<SpikeEvent> events;
  std::int64_t duration_us = 0;

  std::size_t size() const noexcept { return events.size(); }
  bool empty() const noexcept { return events.empty(); }
  std::size_t count(Polarity p) const noexcept;
  std::vector<std::int64_t> timestamps(Polarity p) const;

  /// Throws ValidationError unless timestamps are non-negative, sorted,
  /// strictly increasing per polarity and below duration_us.
  void validate() const;

  friend bool operator==(const SpikeTrain&, const SpikeTrain&) = default;
};

/// Smallest gap between consecutive events of either polarity; nullopt for
/// fewer than two events.
std::optional<std::int64_t> min_inter_event_interval(const SpikeTrain& train);

/// `timestamp_us,polarity` CSV. The reader takes the duration from
/// duration_us when given, otherwise last timestamp + 1.
void save_spike_csv(const std::filesystem::path& path, const SpikeTrain& train);
SpikeTrain load_spike_csv(const std::filesystem::path& path,
                          std::optional<std::int64_t> duration_us = {});

} // namespace admsim
