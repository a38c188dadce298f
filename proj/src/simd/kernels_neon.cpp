// AArch64 variant. Two float64x2 accumulators stand in for the four
// reduction lanes (lanes 0-1 and 2-3) so results match the scalar order.

#include <admsim/simd/kernels.hpp>

#include <arm_neon.h>

#include <cmath>

namespace admsim::simd::neon {
namespace {

constexpr std::size_t kWidth = 4;

struct Lanes {
  float64x2_t lo = vdupq_n_f64(0.0);
  float64x2_t hi = vdupq_n_f64(0.0);

  void spill(double (&lane)[4]) const {
    vst1q_f64(lane, lo);
    vst1q_f64(lane + 2, hi);
  }
};

double combine(const double (&lane)[4]) {
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double sum(std::span<const double> x) {
  Lanes acc;
  std::size_t i = 0;
  for (; i + kWidth <= x.size(); i += kWidth) {
    acc.lo = vaddq_f64(acc.lo, vld1q_f64(x.data() + i));
    acc.hi = vaddq_f64(acc.hi, vld1q_f64(x.data() + i + 2));
  }
  double lane[4];
  acc.spill(lane);
  for (; i < x.size(); ++i) {
    lane[i % 4] += x[i];
  }
  return combine(lane);
}

double sum_squares(std::span<const double> x) {
  Lanes acc;
  std::size_t i = 0;
  for (; i + kWidth <= x.size(); i += kWidth) {
    const float64x2_t a = vld1q_f64(x.data() + i);
    const float64x2_t b = vld1q_f64(x.data() + i + 2);
    acc.lo = vaddq_f64(acc.lo, vmulq_f64(a, a));
    acc.hi = vaddq_f64(acc.hi, vmulq_f64(b, b));
  }
  double lane[4];
  acc.spill(lane);
  for (; i < x.size(); ++i) {
    lane[i % 4] += x[i] * x[i];
  }
  return combine(lane);
}

CrossMoments centered_moments(std::span<const double> x,
                              std::span<const double> y, double mx,
                              double my) {
  const float64x2_t vmx = vdupq_n_f64(mx);
  const float64x2_t vmy = vdupq_n_f64(my);
  Lanes xx;
  Lanes yy;
  Lanes xy;
  std::size_t i = 0;
  for (; i + kWidth <= x.size(); i += kWidth) {
    for (int half = 0; half < 2; ++half) {
      const std::size_t k = i + 2 * static_cast<std::size_t>(half);
      const float64x2_t dx = vsubq_f64(vld1q_f64(x.data() + k), vmx);
      const float64x2_t dy = vsubq_f64(vld1q_f64(y.data() + k), vmy);
      float64x2_t& axx = half == 0 ? xx.lo : xx.hi;
      float64x2_t& ayy = half == 0 ? yy.lo : yy.hi;
      float64x2_t& axy = half == 0 ? xy.lo : xy.hi;
      axx = vaddq_f64(axx, vmulq_f64(dx, dx));
      ayy = vaddq_f64(ayy, vmulq_f64(dy, dy));
      axy = vaddq_f64(axy, vmulq_f64(dx, dy));
    }
  }
  double lxx[4];
  double lyy[4];
  double lxy[4];
  xx.spill(lxx);
  yy.spill(lyy);
  xy.spill(lxy);
  for (; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    lxx[i % 4] += dx * dx;
    lyy[i % 4] += dy * dy;
    lxy[i % 4] += dx * dy;
  }
  return {combine(lxx), combine(lyy), combine(lxy)};
}

void add_scaled(std::span<const double> x, std::span<const double> noise,
                double scale, std::span<double> out) {
  const float64x2_t vs = vdupq_n_f64(scale);
  std::size_t i = 0;
  for (; i + 2 <= x.size(); i += 2) {
    const float64x2_t n = vmulq_f64(vs, vld1q_f64(noise.data() + i));
    vst1q_f64(out.data() + i, vaddq_f64(vld1q_f64(x.data() + i), n));
  }
  for (; i < x.size(); ++i) {
    out[i] = x[i] + scale * noise[i];
  }
}

void abs_deviation(std::span<const double> x, double center,
                   std::span<double> out) {
  const float64x2_t vc = vdupq_n_f64(center);
  std::size_t i = 0;
  for (; i + 2 <= x.size(); i += 2) {
    vst1q_f64(out.data() + i, vabsq_f64(vsubq_f64(vld1q_f64(x.data() + i), vc)));
  }
  for (; i < x.size(); ++i) {
    out[i] = std::fabs(x[i] - center);
  }
}

std::size_t first_set(uint64x2_t hit, std::size_t base) {
  if (vgetq_lane_u64(hit, 0) != 0) {
    return base;
  }
  if (vgetq_lane_u64(hit, 1) != 0) {
    return base + 1;
  }
  return static_cast<std::size_t>(-1);
}

std::size_t find_level_crossing(std::span<const double> x, std::size_t first,
                                double baseline, double up, double down) {
  const double lower = -down;
  const float64x2_t vb = vdupq_n_f64(baseline);
  const float64x2_t vup = vdupq_n_f64(up);
  const float64x2_t vlo = vdupq_n_f64(lower);
  std::size_t i = first;
  for (; i + 2 <= x.size(); i += 2) {
    const float64x2_t d = vsubq_f64(vld1q_f64(x.data() + i), vb);
    const uint64x2_t hit = vorrq_u64(vcgeq_f64(d, vup), vcleq_f64(d, vlo));
    const std::size_t k = first_set(hit, i);
    if (k != static_cast<std::size_t>(-1)) {
      return k;
    }
  }
  for (; i < x.size(); ++i) {
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
  const float64x2_t vt = vdupq_n_f64(threshold);
  const bool rising = threshold > 0.0;
  for (; i + 2 <= x.size(); i += 2) {
    const float64x2_t prev = vld1q_f64(x.data() + i - 1);
    const float64x2_t cur = vld1q_f64(x.data() + i);
    const uint64x2_t hit =
        rising ? vandq_u64(vcltq_f64(prev, vt), vcgeq_f64(cur, vt))
               : vandq_u64(vcgtq_f64(prev, vt), vcleq_f64(cur, vt));
    const std::size_t k = first_set(hit, i);
    if (k != static_cast<std::size_t>(-1)) {
      return k;
    }
  }
  for (; i < x.size(); ++i) {
    const bool crossed = rising ? (x[i - 1] < threshold && x[i] >= threshold)
                                : (x[i - 1] > threshold && x[i] <= threshold);
    if (crossed) {
      return i;
    }
  }
  return x.size();
}

} // namespace

const KernelTable table = {
    Isa::neon,         &sum,          &sum_squares,
    &centered_moments, &add_scaled,   &abs_deviation,
    &find_level_crossing, &find_threshold_crossing,
};

} // namespace admsim::simd::neon
