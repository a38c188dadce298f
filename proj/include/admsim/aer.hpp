#pragma once

// Address-event transport. Wire record (8 bytes, little-endian):
//
//   bytes 0-5  timestamp_us, 48-bit unsigned
//   bytes 6-7  (channel << 1) | polarity, polarity ON = 1
//
// A `.aer` file is a bare sequence of records. Metadata lives in a sidecar
// `<file>.meta` of `key = value` lines.

#include <admsim/spike_train.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace admsim {

inline constexpr std::uint64_t kAerMaxTimestampUs = (std::uint64_t{1} << 48) - 1;
inline constexpr std::uint16_t kAerMaxChannel = 32767;
inline constexpr std::size_t kAerRecordBytes = 8;

struct AerEvent {
  std::uint64_t timestamp_us = 0;
  std::uint16_t channel = 0;
  Polarity polarity = Polarity::on;

  friend bool operator==(const AerEvent&, const AerEvent&) = default;
};

/// Events sorted by (timestamp_us, channel).
struct AerStream {
  std::vector<AerEvent> events;

  std::size_t size() const noexcept { return events.size(); }
  bool empty() const noexcept { return events.empty(); }
  /// Throws ValidationError on out-of-range fields or ordering violations.
  void validate() const;

  friend bool operator==(const AerStream&, const AerStream&) = default;
};

struct ChannelTrain {
  int channel = 0;
  SpikeTrain train;
};

/// Stable merge of per-channel trains; equal timestamps order by channel.
AerStream merge_channels(std::span<const ChannelTrain> trains);

/// Events of one channel as a SpikeTrain spanning [0, duration_us).
SpikeTrain extract_channel(const AerStream& stream, int channel,
                           std::int64_t duration_us);

struct ArbiterResult {
  AerStream egress;
  std::uint64_t max_latency_us = 0;
};

/// Single-server FIFO: egress_i = max(arrival_i, egress_{i-1} + service).
ArbiterResult arbiter_simulate(const AerStream& stream,
                               std::uint64_t service_time_us);

std::vector<std::uint8_t> serialize(const AerStream& stream);
/// Throws FormatError on a length that is not a multiple of 8 or a decoded
/// stream that is out of order.
AerStream deserialize(std::span<const std::uint8_t> bytes);

struct AerSidecar {
  std::optional<double> sample_rate_hz;
  std::optional<std::int64_t> duration_us;
  std::optional<std::uint64_t> service_time_us;
  std::map<int, std::string> channel_labels;
};

std::filesystem::path sidecar_path(const std::filesystem::path& aer_path);

void write_aer_file(const std::filesystem::path& path, const AerStream& stream,
                    const AerSidecar& meta);
AerStream read_aer_file(const std::filesystem::path& path);
/// Missing sidecar yields an empty AerSidecar.
AerSidecar read_aer_sidecar(const std::filesystem::path& aer_path);

} // namespace admsim
