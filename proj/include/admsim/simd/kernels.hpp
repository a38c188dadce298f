#pragma once

// Data-parallel inner loops shared by the signal, encoder and metrics
// modules. Every kernel has a scalar reference and, where the target allows
// it, vector variants (AVX2 on x86-64, NEON on AArch64). The variant is
// selected once at startup from the CPU feature bits; ADMSIM_ISA=scalar in
// the environment forces the reference path.
//
// Reductions use a fixed 4-lane order: element i accumulates into lane
// i % 4 and the lanes combine as (l0 + l1) + (l2 + l3). The scalar reference
// follows the same order, so all variants are bit-identical, not merely
// close.

#include <cstddef>
#include <span>
#include <string_view>

namespace admsim::simd {

enum class Isa { scalar, avx2, neon };

struct CrossMoments {
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
};

/// Function table of one instruction-set variant.
struct KernelTable {
  Isa isa;
  double (*sum)(std::span<const double>);
  double (*sum_squares)(std::span<const double>);
  CrossMoments (*centered_moments)(std::span<const double>,
                                   std::span<const double>, double, double);
  void (*add_scaled)(std::span<const double>, std::span<const double>, double,
                     std::span<double>);
  void (*abs_deviation)(std::span<const double>, double, std::span<double>);
  std::size_t (*find_level_crossing)(std::span<const double>, std::size_t,
                                     double, double, double);
  std::size_t (*find_threshold_crossing)(std::span<const double>, std::size_t,
                                         double);
};

std::string_view isa_name(Isa isa) noexcept;

/// True when the variant was compiled in and the running CPU supports it.
bool isa_supported(Isa isa) noexcept;

/// Table for a specific variant. Throws ConfigError if unsupported.
const KernelTable& kernels_for(Isa isa);

/// Table in use by the free functions below.
const KernelTable& active_kernels() noexcept;
Isa active_isa() noexcept;

/// Overrides runtime selection (tests, benchmarking). Throws ConfigError if
/// the variant is unsupported.
void force_isa(Isa isa);
void reset_isa() noexcept;

double sum(std::span<const double> x);
double sum_squares(std::span<const double> x);

/// Sums of (x - mx)^2, (y - my)^2 and (x - mx)(y - my). Spans must have equal
/// length.
CrossMoments centered_moments(std::span<const double> x,
                              std::span<const double> y, double mx, double my);

/// out[i] = x[i] + scale * noise[i]. out may alias x.
void add_scaled(std::span<const double> x, std::span<const double> noise,
                double scale, std::span<double> out);

/// out[i] = |x[i] - center|. out may alias x.
void abs_deviation(std::span<const double> x, double center,
                   std::span<double> out);

/// First index i >= first with x[i] - baseline >= up or
/// x[i] - baseline <= -down; x.size() when none.
std::size_t find_level_crossing(std::span<const double> x, std::size_t first,
                                double baseline, double up, double down);

/// First index i >= max(first, 1) at which x moves from the zero side of
/// threshold to at-or-beyond it: x[i-1] < t <= x[i] for t > 0, and
/// x[i-1] > t >= x[i] for t < 0. x.size() when none.
std::size_t find_threshold_crossing(std::span<const double> x,
                                    std::size_t first, double threshold);

namespace scalar {
extern const KernelTable table;
}
#if defined(ADMSIM_HAVE_AVX2)
namespace avx2 {
extern const KernelTable table;
}
#endif
#if defined(ADMSIM_HAVE_NEON)
namespace neon {
extern const KernelTable table;
}
#endif

} // namespace admsim::simd
