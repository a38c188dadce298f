#pragma once

// Plain-text `key = value` files (experiment configs, AER sidecars) and the
// unit-suffixed quantities they carry.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace admsim {

/// Ordered (key, value) pairs. Blank lines and lines starting with '#' are
/// skipped. Duplicate keys and lines without '=' throw ConfigError.
std::vector<std::pair<std::string, std::string>>
read_kv_file(const std::filesystem::path& path);

std::vector<std::pair<std::string, std::string>>
parse_kv_text(std::string_view text, std::string_view origin);

double parse_real(std::string_view text, std::string_view what);
std::int64_t parse_integer(std::string_view text, std::string_view what);

/// Volts from "0.15", "150mV", "20uV", "1V".
double parse_voltage(std::string_view text);
/// Microseconds from "1ms", "0.1ms", "500us", "2s" or a bare integer
/// (microseconds). Results must be integral microseconds.
std::int64_t parse_duration_us(std::string_view text);

/// Comma-separated reals, e.g. "1,1.5,2,4".
std::vector<double> parse_real_list(std::string_view text, std::string_view what);

} // namespace admsim
