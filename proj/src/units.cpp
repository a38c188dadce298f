#include <admsim/kv_config.hpp>

#include <admsim/error.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace admsim {

namespace {

std::string_view strip(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

/// Splits "150mV" into (150, "mV").
std::pair<double, std::string_view> number_and_unit(std::string_view text,
                                                    std::string_view what) {
  const std::string_view t = strip(text);
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (begin != end && *begin == '+') {
    ++begin;
  }
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || !std::isfinite(value)) {
    throw ConfigError("invalid " + std::string(what) + ": '" +
                      std::string(t) + "'");
  }
  return {value, strip(std::string_view(ptr, static_cast<std::size_t>(end - ptr)))};
}

} // namespace

std::vector<std::pair<std::string, std::string>>
parse_kv_text(std::string_view text, std::string_view origin) {
  std::vector<std::pair<std::string, std::string>> out;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    ++line_no;
    const std::string_view line = strip(text.substr(start, end - start));
    start = end + 1;
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) +
                        ": expected `key = value`");
    }
    std::string key(strip(line.substr(0, eq)));
    std::string value(strip(line.substr(eq + 1)));
    if (key.empty()) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) +
                        ": empty key");
    }
    if (!seen.insert(key).second) {
      throw ConfigError(std::string(origin) + ":" + std::to_string(line_no) +
                        ": duplicate key '" + key + "'");
    }
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>>
read_kv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open config file: " + path.string());
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_kv_text(ss.str(), path.string());
}

double parse_real(std::string_view text, std::string_view what) {
  const auto [value, unit] = number_and_unit(text, what);
  if (!unit.empty()) {
    throw ConfigError("unexpected suffix '" + std::string(unit) + "' in " +
                      std::string(what));
  }
  return value;
}

std::int64_t parse_integer(std::string_view text, std::string_view what) {
  const std::string_view t = strip(text);
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size()) {
    throw ConfigError("invalid integer for " + std::string(what) + ": '" +
                      std::string(t) + "'");
  }
  return value;
}

double parse_voltage(std::string_view text) {
  const auto [value, unit] = number_and_unit(text, "voltage");
  if (unit.empty() || unit == "V" || unit == "v") {
    return value;
  }
  if (unit == "mV" || unit == "mv") {
    return value * 1e-3;
  }
  if (unit == "uV" || unit == "uv") {
    return value * 1e-6;
  }
  throw ConfigError("unknown voltage unit '" + std::string(unit) + "'");
}

std::int64_t parse_duration_us(std::string_view text) {
  const auto [value, unit] = number_and_unit(text, "duration");
  double us = 0.0;
  if (unit.empty() || unit == "us") {
    us = value;
  } else if (unit == "ms") {
    us = value * 1e3;
  } else if (unit == "s") {
    us = value * 1e6;
  } else {
    throw ConfigError("unknown duration unit '" + std::string(unit) + "'");
  }
  const double rounded = std::round(us);
  if (std::fabs(us - rounded) > 1e-6 * std::max(1.0, std::fabs(us))) {
    throw ConfigError("duration '" + std::string(strip(text)) +
                      "' is not a whole number of microseconds");
  }
  return static_cast<std::int64_t>(rounded);
}

std::vector<double> parse_real_list(std::string_view text,
                                    std::string_view what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_real(text.substr(start, comma - start), what));
    if (comma == std::string_view::npos) {
      break;
    }
    start = comma + 1;
  }
  return out;
}

} // namespace admsim
