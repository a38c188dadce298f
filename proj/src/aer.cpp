#include <admsim/aer.hpp>

#include <admsim/error.hpp>
#include <admsim/kv_config.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace admsim {

namespace {

bool stream_order(const AerEvent& a, const AerEvent& b) {
  return a.timestamp_us != b.timestamp_us ? a.timestamp_us < b.timestamp_us
                                          : a.channel < b.channel;
}

} // namespace

void AerStream::validate() const {
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    if (e.timestamp_us > kAerMaxTimestampUs) {
      throw ValidationError("AER timestamp exceeds 48 bits at event " +
                            std::to_string(i));
    }
    if (e.channel > kAerMaxChannel) {
      throw ValidationError("AER channel out of range at event " +
                            std::to_string(i));
    }
    if (i > 0 && stream_order(e, events[i - 1])) {
      throw ValidationError("AER stream not sorted at event " +
                            std::to_string(i));
    }
  }
}

AerStream merge_channels(std::span<const ChannelTrain> trains) {
  std::set<int> seen;
  std::size_t total = 0;
  for (const auto& ct : trains) {
    if (ct.channel < 0 || ct.channel > kAerMaxChannel) {
      throw ValidationError("channel id out of range: " +
                            std::to_string(ct.channel));
    }
    if (!seen.insert(ct.channel).second) {
      throw ValidationError("duplicate channel id: " +
                            std::to_string(ct.channel));
    }
    ct.train.validate();
    total += ct.train.size();
  }

  AerStream out;
  out.events.reserve(total);
  for (const auto& ct : trains) {
    for (const auto& e : ct.train.events) {
      if (static_cast<std::uint64_t>(e.timestamp_us) > kAerMaxTimestampUs) {
        throw ValidationError("spike timestamp exceeds the 48-bit AER range");
      }
      out.events.push_back({static_cast<std::uint64_t>(e.timestamp_us),
                            static_cast<std::uint16_t>(ct.channel),
                            e.polarity});
    }
  }
  std::stable_sort(out.events.begin(), out.events.end(), stream_order);
  return out;
}

SpikeTrain extract_channel(const AerStream& stream, int channel,
                           std::int64_t duration_us) {
  SpikeTrain train;
  train.duration_us = duration_us;
  for (const auto& e : stream.events) {
    if (e.channel == channel) {
      train.events.push_back(
          {static_cast<std::int64_t>(e.timestamp_us), e.polarity});
    }
  }
  train.validate();
  return train;
}

ArbiterResult arbiter_simulate(const AerStream& stream,
                               std::uint64_t service_time_us) {
  stream.validate();
  ArbiterResult r;
  r.egress.events.reserve(stream.size());
  std::uint64_t free_at = 0;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const auto& in = stream.events[i];
    const std::uint64_t out_t =
        i == 0 ? in.timestamp_us : std::max(in.timestamp_us, free_at);
    if (out_t > kAerMaxTimestampUs) {
      throw ValidationError("arbiter egress time exceeds the 48-bit range");
    }
    r.egress.events.push_back({out_t, in.channel, in.polarity});
    r.max_latency_us = std::max(r.max_latency_us, out_t - in.timestamp_us);
    free_at = out_t + service_time_us;
  }
  return r;
}

std::vector<std::uint8_t> serialize(const AerStream& stream) {
  stream.validate();
  std::vector<std::uint8_t> bytes(stream.size() * kAerRecordBytes);
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const auto& e = stream.events[i];
    std::uint8_t* rec = bytes.data() + i * kAerRecordBytes;
    for (int b = 0; b < 6; ++b) {
      rec[b] = static_cast<std::uint8_t>(e.timestamp_us >> (8 * b));
    }
    const auto word = static_cast<std::uint16_t>(
        (e.channel << 1) | static_cast<std::uint16_t>(e.polarity));
    rec[6] = static_cast<std::uint8_t>(word & 0xFF);
    rec[7] = static_cast<std::uint8_t>(word >> 8);
  }
  return bytes;
}

AerStream deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % kAerRecordBytes != 0) {
    throw FormatError("AER byte length " + std::to_string(bytes.size()) +
                      " is not a multiple of 8");
  }
  AerStream out;
  out.events.resize(bytes.size() / kAerRecordBytes);
  for (std::size_t i = 0; i < out.events.size(); ++i) {
    const std::uint8_t* rec = bytes.data() + i * kAerRecordBytes;
    std::uint64_t t = 0;
    for (int b = 5; b >= 0; --b) {
      t = (t << 8) | rec[b];
    }
    const auto word = static_cast<std::uint16_t>(rec[6] | (rec[7] << 8));
    out.events[i] = {t, static_cast<std::uint16_t>(word >> 1),
                     (word & 1U) != 0 ? Polarity::on : Polarity::off};
    if (i > 0 && stream_order(out.events[i], out.events[i - 1])) {
      throw FormatError("AER records out of order at record " +
                        std::to_string(i));
    }
  }
  return out;
}

std::filesystem::path sidecar_path(const std::filesystem::path& aer_path) {
  auto p = aer_path;
  p += ".meta";
  return p;
}

void write_aer_file(const std::filesystem::path& path, const AerStream& stream,
                    const AerSidecar& meta) {
  const auto bytes = serialize(stream);
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw IoError("cannot write AER file: " + path.string());
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      throw IoError("write failed: " + path.string());
    }
  }

  std::ofstream side(sidecar_path(path));
  if (!side) {
    throw IoError("cannot write AER sidecar for " + path.string());
  }
  side << "format = admsim-aer/1\n";
  side << "event_count = " << stream.size() << '\n';
  if (meta.sample_rate_hz) {
    side << "sample_rate_hz = " << std::setprecision(17) << *meta.sample_rate_hz
         << '\n';
  }
  if (meta.duration_us) {
    side << "duration_us = " << *meta.duration_us << '\n';
  }
  if (meta.service_time_us) {
    side << "service_time_us = " << *meta.service_time_us << '\n';
  }
  for (const auto& [ch, label] : meta.channel_labels) {
    side << "channel." << ch << " = " << label << '\n';
  }
}

AerStream read_aer_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open AER file: " + path.string());
  }
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

AerSidecar read_aer_sidecar(const std::filesystem::path& aer_path) {
  AerSidecar meta;
  const auto side = sidecar_path(aer_path);
  if (!std::filesystem::exists(side)) {
    return meta;
  }
  for (const auto& [key, value] : read_kv_file(side)) {
    if (key == "sample_rate_hz") {
      meta.sample_rate_hz = parse_real(value, key);
    } else if (key == "duration_us") {
      meta.duration_us = parse_integer(value, key);
    } else if (key == "service_time_us") {
      meta.service_time_us =
          static_cast<std::uint64_t>(parse_integer(value, key));
    } else if (key.rfind("channel.", 0) == 0) {
      meta.channel_labels[static_cast<int>(
          parse_integer(key.substr(8), key))] = value;
    } else if (key != "format" && key != "event_count") {
      throw FormatError("unknown sidecar key '" + key + "' in " +
                        side.string());
    }
  }
  return meta;
}

} // namespace admsim
