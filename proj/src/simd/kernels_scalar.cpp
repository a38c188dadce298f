#include <admsim/simd/kernels.hpp>

#include <cmath>

namespace admsim::simd::scalar {
namespace {

double combine(const double (&lane)[4]) {
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double sum(std::span<const double> x) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    lane[i % 4] += x[i];
  }
  return combine(lane);
}

double sum_squares(std::span<const double> x) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    lane[i % 4] += x[i] * x[i];
  }
  return combine(lane);
}

CrossMoments centered_moments(std::span<const double> x,
                              std::span<const double> y, double mx,
                              double my) {
  double xx[4] = {0.0, 0.0, 0.0, 0.0};
  double yy[4] = {0.0, 0.0, 0.0, 0.0};
  double xy[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    xx[i % 4] += dx * dx;
    yy[i % 4] += dy * dy;
    xy[i % 4] += dx * dy;
  }
  return {combine(xx), combine(yy), combine(xy)};
}

void add_scaled(std::span<const double> x, std::span<const double> noise,
                double scale, std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = x[i] + scale * noise[i];
  }
}

void abs_deviation(std::span<const double> x, double center,
                   std::span<double> out) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::fabs(x[i] - center);
  }
}

std::size_t find_level_crossing(std::span<const double> x, std::size_t first,
                                double baseline, double up, double down) {
  const double lower = -down;
  for (std::size_t i = first; i < x.size(); ++i) {
    const double d = x[i] - baseline;
    if (d >= up || d <= lower) {
      return i;
    }
  }
  return x.size();
}

std::size_t find_threshold_crossing(std::span<const double> x,
                                    std::size_t first, double threshold) {
  std::size_t i = first < 1 ? 1 : first;
  if (threshold > 0.0) {
    for (; i < x.size(); ++i) {
      if (x[i - 1] < threshold && x[i] >= threshold) {
        return i;
      }
    }
  } else {
    for (; i < x.size(); ++i) {
      if (x[i - 1] > threshold && x[i] <= threshold) {
        return i;
      }
    }
  }
  return x.size();
}

} // namespace

const KernelTable table = {
    Isa::scalar,       &sum,          &sum_squares,
    &centered_moments, &add_scaled,   &abs_deviation,
    &find_level_crossing, &find_threshold_crossing,
};

} // namespace admsim::simd::scalar
