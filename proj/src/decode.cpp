#include <admsim/decode.hpp>

#include <admsim/error.hpp>
#include <admsim/metrics.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

namespace admsim {

namespace {

Eigen::Index bin_count(std::int64_t bin_width_us, std::int64_t span_us) {
  if (bin_width_us <= 0) {
    throw ConfigError("bin width must be positive");
  }
  if (span_us < bin_width_us) {
    throw ConfigError("binned span must cover at least one bin");
  }
  return static_cast<Eigen::Index>(span_us / bin_width_us);
}

void add_event(BinnedCounts& out, std::int64_t t_us, Eigen::Index column) {
  if (t_us < 0) {
    return;
  }
  const Eigen::Index b = static_cast<Eigen::Index>(t_us / out.bin_width_us);
  if (b < out.counts.rows()) {
    out.counts(b, column) += 1.0;
  }
}

DecodingScore score(const Eigen::MatrixXd& predicted,
                    const Eigen::MatrixXd& targets) {
  DecodingScore s;
  const Eigen::VectorXd px = predicted.col(0);
  const Eigen::VectorXd py = predicted.col(1);
  const Eigen::VectorXd tx = targets.col(0);
  const Eigen::VectorXd ty = targets.col(1);
  s.rho_x = pearson({px.data(), static_cast<std::size_t>(px.size())},
                    {tx.data(), static_cast<std::size_t>(tx.size())});
  s.rho_y = pearson({py.data(), static_cast<std::size_t>(py.size())},
                    {ty.data(), static_cast<std::size_t>(ty.size())});
  s.rho_avg = 0.5 * (s.rho_x + s.rho_y);
  return s;
}

} // namespace

void KinematicsSeries::validate() const {
  if (t_us.empty()) {
    throw ValidationError("kinematics series is empty");
  }
  if (vx.size() != t_us.size() || vy.size() != t_us.size()) {
    throw ValidationError("kinematics columns differ in length");
  }
  for (std::size_t i = 1; i < t_us.size(); ++i) {
    if (t_us[i] <= t_us[i - 1]) {
      throw ValidationError("kinematics timestamps must strictly increase (row " +
                            std::to_string(i) + ")");
    }
  }
  for (std::size_t i = 0; i < t_us.size(); ++i) {
    if (!std::isfinite(vx[i]) || !std::isfinite(vy[i])) {
      throw ValidationError("non-finite kinematics value at row " +
                            std::to_string(i));
    }
  }
}

KinematicsSeries load_kinematics_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open kinematics file: " + path.string());
  }
  KinematicsSeries k;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty() || (line_no == 1 && line == "time_s,vx,vy")) {
      continue;
    }
    double v[3];
    std::size_t start = 0;
    for (int c = 0; c < 3; ++c) {
      const auto comma = line.find(',', start);
      if ((c < 2) == (comma == std::string::npos)) {
        throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                              ": expected `time_s,vx,vy`");
      }
      const std::string field = line.substr(start, comma - start);
      auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v[c]);
      if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ValidationError(path.string() + ":" + std::to_string(line_no) +
                              ": not a number '" + field + "'");
      }
      start = comma + 1;
    }
    k.t_us.push_back(std::llround(v[0] * 1e6));
    k.vx.push_back(v[1]);
    k.vy.push_back(v[2]);
  }
  k.validate();
  return k;
}

void save_kinematics_csv(const std::filesystem::path& path,
                         const KinematicsSeries& kinematics) {
  kinematics.validate();
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write kinematics file: " + path.string());
  }
  out << "time_s,vx,vy\n";
  char buf[96];
  for (std::size_t i = 0; i < kinematics.t_us.size(); ++i) {
    const int n = std::snprintf(buf, sizeof buf, "%.6f,%.17g,%.17g\n",
                                static_cast<double>(kinematics.t_us[i]) * 1e-6,
                                kinematics.vx[i], kinematics.vy[i]);
    out.write(buf, n);
  }
  if (!out) {
    throw IoError("write failed: " + path.string());
  }
}

Eigen::MatrixXd LinearReadout::predict(const Eigen::MatrixXd& features) const {
  if (features.cols() != weights.rows()) {
    throw ValidationError("feature count does not match the readout");
  }
  Eigen::MatrixXd y = features * weights;
  y.rowwise() += bias.transpose();
  return y;
}

BinnedCounts bin_spikes(const SpikeTrain& train, std::int64_t bin_width_us,
                        std::int64_t span_us) {
  BinnedCounts out;
  out.bin_width_us = bin_width_us;
  out.counts = Eigen::MatrixXd::Zero(bin_count(bin_width_us, span_us), 2);
  for (const auto& e : train.events) {
    add_event(out, e.timestamp_us, static_cast<Eigen::Index>(e.polarity));
  }
  return out;
}

BinnedCounts bin_spikes(const AerStream& stream, int channels,
                        std::int64_t bin_width_us, std::int64_t span_us) {
  if (channels <= 0) {
    throw ConfigError("channel count must be positive");
  }
  BinnedCounts out;
  out.bin_width_us = bin_width_us;
  out.counts = Eigen::MatrixXd::Zero(bin_count(bin_width_us, span_us),
                                     2 * static_cast<Eigen::Index>(channels));
  for (const auto& e : stream.events) {
    if (e.channel >= channels) {
      throw ValidationError("event channel " + std::to_string(e.channel) +
                            " outside the binned channel range");
    }
    add_event(out, static_cast<std::int64_t>(e.timestamp_us),
              2 * static_cast<Eigen::Index>(e.channel) +
                  static_cast<Eigen::Index>(e.polarity));
  }
  return out;
}

Eigen::MatrixXd leaky_features(const BinnedCounts& counts, std::int64_t tau_us) {
  if (tau_us <= 0) {
    throw ConfigError("feature time constant must be positive");
  }
  const double alpha = std::exp(-static_cast<double>(counts.bin_width_us) /
                                static_cast<double>(tau_us));
  Eigen::MatrixXd y(counts.counts.rows(), counts.counts.cols());
  if (y.rows() == 0) {
    return y;
  }
  y.row(0) = counts.counts.row(0);
  for (Eigen::Index n = 1; n < y.rows(); ++n) {
    y.row(n) = alpha * y.row(n - 1) + counts.counts.row(n);
  }
  return y;
}

Eigen::MatrixXd resample_kinematics(const KinematicsSeries& kinematics,
                                    std::int64_t bin_width_us,
                                    Eigen::Index bins) {
  kinematics.validate();
  Eigen::MatrixXd out(bins, 2);
  const auto& t = kinematics.t_us;
  std::size_t hi = 0;
  for (Eigen::Index b = 0; b < bins; ++b) {
    const double center = (static_cast<double>(b) + 0.5) *
                          static_cast<double>(bin_width_us);
    while (hi < t.size() && static_cast<double>(t[hi]) < center) {
      ++hi;
    }
    if (hi == 0) {
      out(b, 0) = kinematics.vx.front();
      out(b, 1) = kinematics.vy.front();
    } else if (hi == t.size()) {
      out(b, 0) = kinematics.vx.back();
      out(b, 1) = kinematics.vy.back();
    } else {
      const double t0 = static_cast<double>(t[hi - 1]);
      const double t1 = static_cast<double>(t[hi]);
      const double f = (center - t0) / (t1 - t0);
      out(b, 0) = kinematics.vx[hi - 1] + f * (kinematics.vx[hi] - kinematics.vx[hi - 1]);
      out(b, 1) = kinematics.vy[hi - 1] + f * (kinematics.vy[hi] - kinematics.vy[hi - 1]);
    }
  }
  return out;
}

LinearReadout fit_readout(const Eigen::MatrixXd& features,
                          const Eigen::MatrixXd& targets, double ridge_lambda) {
  if (!(ridge_lambda >= 0.0) || !std::isfinite(ridge_lambda)) {
    throw ConfigError("ridge lambda must be finite and >= 0");
  }
  if (targets.cols() != 2 || targets.rows() != features.rows()) {
    throw ValidationError("targets must be rows(features) x 2");
  }
  const Eigen::Index p = features.cols();
  if (features.rows() < p + 1) {
    throw ValidationError("readout needs at least features + 1 rows");
  }

  Eigen::MatrixXd design(features.rows(), p + 1);
  design.leftCols(p) = features;
  design.col(p).setOnes();

  Eigen::MatrixXd normal = design.transpose() * design;
  normal.diagonal().head(p).array() += ridge_lambda;
  const Eigen::MatrixXd rhs = design.transpose() * targets;

  const Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
  if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-13)) {
    throw NumericalError("readout normal equations are singular; use a ridge "
                         "lambda > 0");
  }
  const Eigen::MatrixXd solution = ldlt.solve(rhs);
  if (!solution.allFinite()) {
    throw NumericalError("readout solve produced non-finite weights");
  }

  LinearReadout r;
  r.weights = solution.topRows(p);
  r.bias = solution.row(p).transpose();
  r.ridge_lambda = ridge_lambda;
  return r;
}

DecodingScore evaluate_decoding(const LinearReadout& readout,
                                const Eigen::MatrixXd& features,
                                const Eigen::MatrixXd& targets) {
  if (targets.cols() != 2 || targets.rows() != features.rows()) {
    throw ValidationError("targets must be rows(features) x 2");
  }
  return score(readout.predict(features), targets);
}

DecodeResult run_decoding(const BinnedCounts& counts,
                          const KinematicsSeries& kinematics,
                          const DecodeOptions& options) {
  if (options.lambda_grid.empty()) {
    throw ConfigError("lambda grid is empty");
  }
  if (!(options.train_fraction > 0.0) || !(options.validation_fraction >= 0.0) ||
      !(options.train_fraction + options.validation_fraction < 1.0)) {
    throw ConfigError("split fractions must leave a non-empty test set");
  }
  const Eigen::MatrixXd features = leaky_features(counts, options.tau_us);
  const Eigen::MatrixXd targets =
      resample_kinematics(kinematics, counts.bin_width_us, counts.bins());

  const Eigen::Index n = features.rows();
  const auto n_train = static_cast<Eigen::Index>(
      std::floor(options.train_fraction * static_cast<double>(n)));
  const auto n_val = static_cast<Eigen::Index>(
      std::floor(options.validation_fraction * static_cast<double>(n)));
  const Eigen::Index n_fit = n_train + n_val;
  const Eigen::Index n_test = n - n_fit;
  if (n_train < features.cols() + 1 || n_test < 2) {
    throw ValidationError("too few bins for the train/validation/test split");
  }

  double best_lambda = options.lambda_grid.front();
  if (options.lambda_grid.size() > 1) {
    if (n_val < 2) {
      throw ValidationError("lambda selection needs a validation split");
    }
    double best = -std::numeric_limits<double>::infinity();
    for (double lambda : options.lambda_grid) {
      try {
        const auto r = fit_readout(features.topRows(n_train),
                                   targets.topRows(n_train), lambda);
        const auto s = evaluate_decoding(r, features.middleRows(n_train, n_val),
                                         targets.middleRows(n_train, n_val));
        if (s.rho_avg > best) {
          best = s.rho_avg;
          best_lambda = lambda;
        }
      } catch (const NumericalError&) {
      } catch (const DomainError&) {
      }
    }
    if (!std::isfinite(best)) {
      throw NumericalError("no lambda in the grid produced a usable readout");
    }
  }

  DecodeResult result;
  result.lambda = best_lambda;
  result.readout = fit_readout(features.topRows(n_fit), targets.topRows(n_fit),
                               best_lambda);
  result.train = evaluate_decoding(result.readout, features.topRows(n_fit),
                                   targets.topRows(n_fit));
  result.test = evaluate_decoding(result.readout, features.bottomRows(n_test),
                                  targets.bottomRows(n_test));
  return result;
}

} // namespace admsim
