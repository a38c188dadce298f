// Compiled with -mavx2 only; callers reach these through the dispatch table
// after a CPUID check.

#include <admsim/simd/kernels.hpp>

#include <immintrin.h>

#include <cmath>

namespace admsim::simd::avx2 {
namespace {

constexpr std::size_t kWidth = 4;

double finish(__m256d acc, std::span<const double> tail_src, std::size_t from,
              bool square) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  for (std::size_t i = from; i < tail_src.size(); ++i) {
    const double v = tail_src[i];
    lane[i % 4] += square ? v * v : v;
  }
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double sum(std::span<const double> x) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kWidth <= x.size(); i += kWidth) {
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(x.data() + i));
  }
  return finish(acc, x, i, false);
}

double sum_squares(std::span<const double> x) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kWidth <= x.size(); i += kWidth) {
    const __m256d v = _mm256_loadu_pd(x.data() + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
  }
  return finish(acc, x, i, true);
}

CrossMoments centered_moments(std::span<const double> x,
                              std::span<const double> y, double mx,
                              double my) {
  const __m256d vmx = _mm256_set1_pd(mx);
  const __m256d vmy = _mm256_set1_pd(my);
  __m256d xx = _mm256_setzero_pd();
  __m256d yy = _mm256_setzero_pd();
  __m256d xy = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kWidth <= x.size(); i += kWidth) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x.data() + i), vmx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(y.data() + i), vmy);
    xx = _mm256_add_pd(xx, _mm256_mul_pd(dx, dx));
    yy = _mm256_add_pd(yy, _mm256_mul_pd(dy, dy));
    xy = _mm256_add_pd(xy, _mm256_mul_pd(dx, dy));
  }
  alignas(32) double lxx[4];
  alignas(32) double lyy[4];
  alignas(32) double lxy[4];
  _mm256_store_pd(lxx, xx);
  _mm256_store_pd(lyy, yy);
  _mm256_store_pd(lxy, xy);
  for (; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    lxx[i % 4] += dx * dx;
    lyy[i % 4] += dy * dy;
    lxy[i % 4] += dx * dy;
  }
  return {(lxx[0] + lxx[1]) + (lxx[2] + lxx[3]),
          (lyy[0] + lyy[1]) + (lyy[2] + lyy[3]),
          (lxy[0] + lxy[1]) + (lxy[2] + lxy[3])};
}

void add_scaled(std::span<const double> x, std::span<const double> noise,
                double scale, std::span<double> out) {
  const __m256d vs = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + kWidth <= x.size(); i += kWidth) {
    const __m256d n = _mm256_mul_pd(vs, _mm256_loadu_pd(noise.data() + i));
    _mm256_storeu_pd(out.data() + i,
                     _mm256_add_pd(_mm256_loadu_pd(x.data() + i), n));
  }
  for (; i < x.size(); ++i) {
    out[i] = x[i] + scale * noise[i];
  }
}

void abs_deviation(std::span<const double> x, double center,
                   std::span<double> out) {
  const __m256d vc = _mm256_set1_pd(center);
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + kWidth <= x.size(); i += kWidth) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x.data() + i), vc);
    _mm256_storeu_pd(out.data() + i, _mm256_andnot_pd(sign, d));
  }
  for (; i < x.size(); ++i) {
    out[i] = std::fabs(x[i] - center);
  }
}

std::size_t find_level_crossing(std::span<const double> x, std::size_t first,
                                double baseline, double up, double down) {
  const double lower = -down;
  const __m256d vb = _mm256_set1_pd(baseline);
  const __m256d vup = _mm256_set1_pd(up);
  const __m256d vlo = _mm256_set1_pd(lower);
  std::size_t i = first;
  for (; i + kWidth <= x.size(); i += kWidth) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x.data() + i), vb);
    const __m256d hit = _mm256_or_pd(_mm256_cmp_pd(d, vup, _CMP_GE_OQ),
                                     _mm256_cmp_pd(d, vlo, _CMP_LE_OQ));
    const int mask = _mm256_movemask_pd(hit);
    if (mask != 0) {
      return i + static_cast<std::size_t>(__builtin_ctz(mask));
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
  const __m256d vt = _mm256_set1_pd(threshold);
  const bool rising = threshold > 0.0;
  for (; i + kWidth <= x.size(); i += kWidth) {
    const __m256d prev = _mm256_loadu_pd(x.data() + i - 1);
    const __m256d cur = _mm256_loadu_pd(x.data() + i);
    __m256d hit;
    if (rising) {
      hit = _mm256_and_pd(_mm256_cmp_pd(prev, vt, _CMP_LT_OQ),
                          _mm256_cmp_pd(cur, vt, _CMP_GE_OQ));
    } else {
      hit = _mm256_and_pd(_mm256_cmp_pd(prev, vt, _CMP_GT_OQ),
                          _mm256_cmp_pd(cur, vt, _CMP_LE_OQ));
    }
    const int mask = _mm256_movemask_pd(hit);
    if (mask != 0) {
      return i + static_cast<std::size_t>(__builtin_ctz(mask));
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
    Isa::avx2,         &sum,          &sum_squares,
    &centered_moments, &add_scaled,   &abs_deviation,
    &find_level_crossing, &find_threshold_crossing,
};

} // namespace admsim::simd::avx2
