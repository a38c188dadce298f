#include <admsim/signal.hpp>

#include <admsim/error.hpp>
#include <admsim/simd/kernels.hpp>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

namespace admsim {

namespace {

constexpr double kMadToSigma = 0.6745;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

bool parse_double(std::string_view token, double& out) {
  const std::string t = trim(token);
  if (t.empty()) {
    return false;
  }
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (*begin == '+') {
    ++begin;
  }
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) {
      break;
    }
    start = pos + 1;
  }
  return out;
}

SampledSignal load_csv(const std::filesystem::path& path,
                       double sample_rate_hz) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open signal file: " + path.string());
  }
  std::vector<double> times;
  std::vector<double> values;
  std::size_t columns = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string row = trim(line);
    if (row.empty()) {
      continue;
    }
    if (line_no == 1 && (row == "time_s,value_v" || row == "value_v")) {
      continue;
    }
    const auto fields = split_commas(row);
    if (fields.size() > 2 || (columns != 0 && fields.size() != columns)) {
      throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                            ": parse error: unexpected column count");
    }
    columns = fields.size();
    double parsed[2] = {0.0, 0.0};
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (!parse_double(fields[c], parsed[c])) {
        throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                              ": parse error: not a number '" +
                              trim(fields[c]) + "'");
      }
      if (!std::isfinite(parsed[c])) {
        throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                              ": non-finite value");
      }
    }
    if (columns == 2) {
      times.push_back(parsed[0]);
      values.push_back(parsed[1]);
    } else {
      values.push_back(parsed[0]);
    }
  }

  if (columns != 2) {
    if (!(sample_rate_hz > 0.0)) {
      throw ConfigError("single-column CSV needs a positive sample rate");
    }
    return SampledSignal(std::move(values), sample_rate_hz);
  }

  if (times.size() < 2) {
    if (!(sample_rate_hz > 0.0)) {
      throw ValidationError(
          "cannot infer a sample rate from fewer than two timestamps");
    }
    const double t0 = times.empty() ? 0.0 : times.front();
    if (t0 < 0.0) {
      throw ValidationError("negative start time in " + path.string());
    }
    return SampledSignal(std::move(values), sample_rate_hz,
                         std::llround(t0 * 1e6));
  }

  const double span = times.back() - times.front();
  if (!(span > 0.0)) {
    throw ValidationError("timestamps are not increasing in " + path.string());
  }
  const double period = span / static_cast<double>(times.size() - 1);
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double expected = times.front() + period * static_cast<double>(i);
    if (std::fabs(times[i] - expected) > 0.5 * period) {
      throw ValidationError("non-uniform timestamps in " + path.string() +
                            " at sample " + std::to_string(i));
    }
  }
  if (times.front() < 0.0) {
    throw ValidationError("negative start time in " + path.string());
  }
  return SampledSignal(std::move(values), 1.0 / period,
                       std::llround(times.front() * 1e6));
}

SampledSignal load_raw(const std::filesystem::path& path,
                       double sample_rate_hz) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open signal file: " + path.string());
  }
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  if (bytes.size() % 4 != 0) {
    throw ValidationError("raw float32 file length is not a multiple of 4: " +
                          path.string());
  }
  if (!(sample_rate_hz > 0.0)) {
    throw ConfigError("raw signals need a positive sample rate");
  }
  std::vector<double> values(bytes.size() / 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t word = 0;
    for (int b = 3; b >= 0; --b) {
      word = (word << 8) |
             static_cast<std::uint8_t>(bytes[i * 4 + static_cast<std::size_t>(b)]);
    }
    values[i] = static_cast<double>(std::bit_cast<float>(word));
  }
  return SampledSignal(std::move(values), sample_rate_hz);
}

} // namespace

SampledSignal::SampledSignal(std::vector<double> samples,
                             double sample_rate_hz, std::int64_t t0_us)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz),
      t0_us_(t0_us) {
  if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_)) {
    throw ValidationError("sample rate must be positive and finite");
  }
  if (t0_us_ < 0) {
    throw ValidationError("signal start time must be non-negative");
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw ValidationError("non-finite sample at index " + std::to_string(i));
    }
  }
}

std::int64_t SampledSignal::time_us(std::size_t i) const noexcept {
  return t0_us_ +
         std::llround(static_cast<double>(i) * 1e6 / sample_rate_hz_);
}

SampledSignal SampledSignal::with_samples(std::vector<double> samples) const {
  return SampledSignal(std::move(samples), sample_rate_hz_, t0_us_);
}

SampledSignal load_signal(const std::filesystem::path& path,
                          SignalFormat format, double sample_rate_hz) {
  if (!std::filesystem::exists(path)) {
    throw IoError("signal file does not exist: " + path.string());
  }
  return format == SignalFormat::csv ? load_csv(path, sample_rate_hz)
                                     : load_raw(path, sample_rate_hz);
}

void save_signal_csv(const std::filesystem::path& path,
                     const SampledSignal& signal) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write signal file: " + path.string());
  }
  out << "time_s,value_v\n";
  char buf[64];
  const double t0 = static_cast<double>(signal.t0_us()) * 1e-6;
  for (std::size_t i = 0; i < signal.size(); ++i) {
    const double t =
        t0 + static_cast<double>(i) / signal.sample_rate_hz();
    const int n = std::snprintf(buf, sizeof buf, "%.12g,%.17g\n", t, signal[i]);
    out.write(buf, n);
  }
  if (!out) {
    throw IoError("write failed: " + path.string());
  }
}

void FrontEndConfig::validate() const {
  if (!(f_low_hz > 0.0) || !(f_high_hz > 0.0)) {
    throw ConfigError("front-end corner frequencies must be positive");
  }
  if (!(f_low_hz < f_high_hz)) {
    throw ConfigError("front-end low corner must lie below the high corner");
  }
  if (!std::isfinite(midband_gain_db)) {
    throw ConfigError("front-end gain must be finite");
  }
  if (!(input_noise_vrms >= 0.0)) {
    throw ConfigError("input-referred noise must be non-negative");
  }
}

double FrontEndConfig::midband_gain_linear() const {
  return std::pow(10.0, midband_gain_db / 20.0);
}

FrontEndFilter::FrontEndFilter(const FrontEndConfig& config,
                               double sample_rate_hz)
    : sample_rate_hz_(sample_rate_hz) {
  config.validate();
  if (!(sample_rate_hz > 2.0 * config.f_high_hz)) {
    throw ConfigError("sample rate must exceed twice the front-end high "
                      "corner (" +
                      std::to_string(2.0 * config.f_high_hz) + " Hz)");
  }
  const double kl = std::tan(std::numbers::pi * config.f_low_hz / sample_rate_hz);
  const double kh =
      std::tan(std::numbers::pi * config.f_high_hz / sample_rate_hz);
  highpass_ = {1.0 / (1.0 + kl), -1.0 / (1.0 + kl), (kl - 1.0) / (1.0 + kl)};
  lowpass_ = {kh / (1.0 + kh), kh / (1.0 + kh), (kh - 1.0) / (1.0 + kh)};

  const double f0 = std::sqrt(config.f_low_hz * config.f_high_hz);
  scale_ = 1.0;
  scale_ = config.midband_gain_linear() / magnitude_at(f0);
}

double FrontEndFilter::magnitude_at(double freq_hz) const {
  const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate_hz_;
  const std::complex<double> zinv = std::polar(1.0, -w);
  auto section = [&](const Section& s) {
    return (s.b0 + s.b1 * zinv) / (1.0 + s.a1 * zinv);
  };
  return scale_ * std::abs(section(highpass_) * section(lowpass_));
}

std::vector<double> FrontEndFilter::process(std::span<const double> input) const {
  std::vector<double> out(input.size());
  double hp_x = 0.0;
  double hp_y = 0.0;
  double lp_x = 0.0;
  double lp_y = 0.0;
  for (std::size_t i = 0; i < input.size(); ++i) {
    const double x = input[i];
    const double h = highpass_.b0 * x + highpass_.b1 * hp_x - highpass_.a1 * hp_y;
    hp_x = x;
    hp_y = h;
    const double l = lowpass_.b0 * h + lowpass_.b1 * lp_x - lowpass_.a1 * lp_y;
    lp_x = h;
    lp_y = l;
    out[i] = scale_ * l;
  }
  return out;
}

SampledSignal bandpass_front_end(const SampledSignal& signal,
                                 const FrontEndConfig& config) {
  const FrontEndFilter filter(config, signal.sample_rate_hz());
  return signal.with_samples(filter.process(signal.samples()));
}

double measure_sinusoid_gain(const FrontEndConfig& config,
                             double sample_rate_hz, double freq_hz) {
  const FrontEndFilter filter(config, sample_rate_hz);
  // Settle for at least 0.2 s (100 high-pass time constants at 80 Hz) and
  // 20 cycles, then fit over another 20 cycles or 0.2 s.
  const double settle_s = std::max(0.2, 20.0 / freq_hz);
  const double window_s = std::max(0.2, 20.0 / freq_hz);
  const auto settle = static_cast<std::size_t>(settle_s * sample_rate_hz);
  const auto window = static_cast<std::size_t>(window_s * sample_rate_hz);
  std::vector<double> drive(settle + window);
  const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate_hz;
  for (std::size_t i = 0; i < drive.size(); ++i) {
    drive[i] = std::sin(w * static_cast<double>(i));
  }
  const std::vector<double> y = filter.process(drive);

  // Least-squares fit y ~ a sin + b cos over the window.
  double ss = 0.0, cc = 0.0, sc = 0.0, ys = 0.0, yc = 0.0;
  for (std::size_t i = settle; i < y.size(); ++i) {
    const double s = std::sin(w * static_cast<double>(i));
    const double c = std::cos(w * static_cast<double>(i));
    ss += s * s;
    cc += c * c;
    sc += s * c;
    ys += y[i] * s;
    yc += y[i] * c;
  }
  const double det = ss * cc - sc * sc;
  const double a = (ys * cc - yc * sc) / det;
  const double b = (yc * ss - ys * sc) / det;
  return std::hypot(a, b);
}

NoiseInjection inject_awgn(const SampledSignal& signal,
                           double level_multiplier, std::uint64_t rng_seed) {
  if (!(level_multiplier >= 0.0) || !std::isfinite(level_multiplier)) {
    throw ConfigError("noise level multiplier must be a finite value >= 0");
  }
  NoiseInjection result;
  if (level_multiplier == 0.0 || signal.empty()) {
    result.signal = signal;
    return result;
  }
  const double sigma = level_multiplier * median_abs(signal.samples());
  if (sigma == 0.0) {
    result.signal = signal;
    result.degenerate = true;
    return result;
  }

  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> noise(signal.size());
  for (double& n : noise) {
    n = gauss(rng);
  }
  std::vector<double> out(signal.size());
  simd::add_scaled(signal.samples(), noise, sigma, out);
  result.signal = signal.with_samples(std::move(out));
  result.sigma_v = sigma;
  return result;
}

double estimate_noise_sigma_mad(const SampledSignal& signal) {
  if (signal.size() < 2) {
    throw ValidationError("MAD noise estimate needs at least two samples");
  }
  const double center = median({signal.samples().begin(), signal.samples().end()});
  std::vector<double> dev(signal.size());
  simd::abs_deviation(signal.samples(), center, dev);
  return median(std::move(dev)) / kMadToSigma;
}

double estimate_snr_db(const SampledSignal& signal, double noise_sigma) {
  if (!(noise_sigma > 0.0)) {
    throw DomainError("noise sigma must be positive for an SNR estimate");
  }
  return 20.0 * std::log10(rms(signal.samples()) / noise_sigma);
}

double rms(std::span<const double> x) {
  if (x.empty()) {
    return 0.0;
  }
  return std::sqrt(simd::sum_squares(x) / static_cast<double>(x.size()));
}

double mean(std::span<const double> x) {
  if (x.empty()) {
    return 0.0;
  }
  return simd::sum(x) / static_cast<double>(x.size());
}

double median(std::vector<double> values) {
  if (values.empty()) {
    throw ValidationError("median of an empty sequence");
  }
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) {
    return upper;
  }
  const double lower = *std::max_element(
      values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double median_abs(std::span<const double> x) {
  std::vector<double> mags(x.size());
  simd::abs_deviation(x, 0.0, mags);
  return median(std::move(mags));
}

} // namespace admsim
