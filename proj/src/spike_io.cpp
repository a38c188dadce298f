#include <admsim/spike_train.hpp>

#include <admsim/error.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <string>

namespace admsim {

std::string_view to_string(Polarity p) noexcept {
  return p == Polarity::on ? "ON" : "OFF";
}

std::size_t SpikeTrain::count(Polarity p) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(),
                    [p](const SpikeEvent& e) { return e.polarity == p; }));
}

std::vector<std::int64_t> SpikeTrain::timestamps(Polarity p) const {
  std::vector<std::int64_t> out;
  for (const auto& e : events) {
    if (e.polarity == p) {
      out.push_back(e.timestamp_us);
    }
  }
  return out;
}

void SpikeTrain::validate() const {
  if (duration_us < 0) {
    throw ValidationError("spike train duration must be non-negative");
  }
  std::int64_t last_any = -1;
  std::int64_t last[2] = {-1, -1};
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    const auto where = " (event " + std::to_string(i) + ")";
    if (e.timestamp_us < 0) {
      throw ValidationError("negative spike timestamp" + where);
    }
    if (e.timestamp_us < last_any) {
      throw ValidationError("spike train is not sorted by timestamp" + where);
    }
    auto& prev = last[static_cast<int>(e.polarity)];
    if (e.timestamp_us <= prev) {
      throw ValidationError("duplicate " + std::string(to_string(e.polarity)) +
                            " timestamp" + where);
    }
    if (e.timestamp_us >= duration_us) {
      throw ValidationError("spike timestamp beyond train duration" + where);
    }
    prev = e.timestamp_us;
    last_any = e.timestamp_us;
  }
}

std::optional<std::int64_t> min_inter_event_interval(const SpikeTrain& train) {
  if (train.events.size() < 2) {
    return std::nullopt;
  }
  std::int64_t best = train.events[1].timestamp_us - train.events[0].timestamp_us;
  for (std::size_t i = 2; i < train.events.size(); ++i) {
    best = std::min(best, train.events[i].timestamp_us -
                              train.events[i - 1].timestamp_us);
  }
  return best;
}

void save_spike_csv(const std::filesystem::path& path, const SpikeTrain& train) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write spike file: " + path.string());
  }
  out << "timestamp_us,polarity\n";
  for (const auto& e : train.events) {
    out << e.timestamp_us << ',' << to_string(e.polarity) << '\n';
  }
  if (!out) {
    throw IoError("write failed: " + path.string());
  }
}

SpikeTrain load_spike_csv(const std::filesystem::path& path,
                          std::optional<std::int64_t> duration_us) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open spike file: " + path.string());
  }
  SpikeTrain train;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    if (line_no == 1 && line == "timestamp_us,polarity") {
      continue;
    }
    const auto comma = line.find(',');
    const auto fail = [&](const char* why) {
      return ValidationError(path.string() + ":" + std::to_string(line_no) +
                             ": " + why);
    };
    if (comma == std::string::npos) {
      throw fail("expected `timestamp_us,polarity`");
    }
    std::int64_t ts = 0;
    const char* begin = line.data();
    const char* end = line.data() + comma;
    auto [ptr, ec] = std::from_chars(begin, end, ts);
    if (ec != std::errc() || ptr != end) {
      throw fail("bad timestamp");
    }
    const std::string pol = line.substr(comma + 1);
    Polarity p;
    if (pol == "ON") {
      p = Polarity::on;
    } else if (pol == "OFF") {
      p = Polarity::off;
    } else {
      throw fail("polarity must be ON or OFF");
    }
    train.events.push_back({ts, p});
  }
  if (duration_us) {
    train.duration_us = *duration_us;
  } else if (!train.events.empty()) {
    // Largest, not last, so an unsorted file fails on ordering rather than
    // on duration.
    std::int64_t top = 0;
    for (const auto& e : train.events) {
      top = std::max(top, e.timestamp_us);
    }
    train.duration_us = top + 1;
  }
  train.validate();
  return train;
}

} // namespace admsim
