#include <admsim/simd/kernels.hpp>

#include <admsim/error.hpp>

#include <atomic>
#include <cstdlib>
#include <string>

namespace admsim::simd {
namespace {

bool cpu_has(Isa isa) noexcept {
  switch (isa) {
  case Isa::scalar:
    return true;
  case Isa::avx2:
#if defined(ADMSIM_HAVE_AVX2)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
  case Isa::neon:
#if defined(ADMSIM_HAVE_NEON)
    return true; // mandatory on AArch64
#else
    return false;
#endif
  }
  return false;
}

const KernelTable* table_of(Isa isa) noexcept {
  switch (isa) {
  case Isa::scalar:
    return &scalar::table;
  case Isa::avx2:
#if defined(ADMSIM_HAVE_AVX2)
    return &avx2::table;
#else
    return nullptr;
#endif
  case Isa::neon:
#if defined(ADMSIM_HAVE_NEON)
    return &neon::table;
#else
    return nullptr;
#endif
  }
  return nullptr;
}

const KernelTable* detect() noexcept {
  if (const char* env = std::getenv("ADMSIM_ISA")) {
    const std::string want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == isa_name(isa) && cpu_has(isa) && table_of(isa) != nullptr) {
        return table_of(isa);
      }
    }
  }
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (cpu_has(isa) && table_of(isa) != nullptr) {
      return table_of(isa);
    }
  }
  return &scalar::table;
}

std::atomic<const KernelTable*>& active_slot() noexcept {
  static std::atomic<const KernelTable*> slot{detect()};
  return slot;
}

} // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
  case Isa::scalar:
    return "scalar";
  case Isa::avx2:
    return "avx2";
  case Isa::neon:
    return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) noexcept {
  return table_of(isa) != nullptr && cpu_has(isa);
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_supported(isa)) {
    throw ConfigError("instruction set '" + std::string(isa_name(isa)) +
                      "' is not available on this machine");
  }
  return *table_of(isa);
}

const KernelTable& active_kernels() noexcept {
  return *active_slot().load(std::memory_order_relaxed);
}

Isa active_isa() noexcept { return active_kernels().isa; }

void force_isa(Isa isa) {
  active_slot().store(&kernels_for(isa), std::memory_order_relaxed);
}

void reset_isa() noexcept {
  active_slot().store(detect(), std::memory_order_relaxed);
}

double sum(std::span<const double> x) { return active_kernels().sum(x); }

double sum_squares(std::span<const double> x) {
  return active_kernels().sum_squares(x);
}

CrossMoments centered_moments(std::span<const double> x,
                              std::span<const double> y, double mx,
                              double my) {
  return active_kernels().centered_moments(x, y, mx, my);
}

void add_scaled(std::span<const double> x, std::span<const double> noise,
                double scale, std::span<double> out) {
  active_kernels().add_scaled(x, noise, scale, out);
}

void abs_deviation(std::span<const double> x, double center,
                   std::span<double> out) {
  active_kernels().abs_deviation(x, center, out);
}

std::size_t find_level_crossing(std::span<const double> x, std::size_t first,
                                double baseline, double up, double down) {
  return active_kernels().find_level_crossing(x, first, baseline, up, down);
}

std::size_t find_threshold_crossing(std::span<const double> x,
                                    std::size_t first, double threshold) {
  return active_kernels().find_threshold_crossing(x, first, threshold);
}

} // namespace admsim::simd
