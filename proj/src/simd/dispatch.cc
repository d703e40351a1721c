#include <atomic>
#include <cstdlib>
#include <string>

#include "audiozoom/error.h"
#include "simd/kernel_variants.h"

namespace azoom::simd {
namespace {

Isa DetectIsa() {
  if (const char* forced = std::getenv("AUDIOZOOM_ISA")) {
    if (auto isa = parse_isa(forced); isa && isa_supported(*isa)) return *isa;
  }
  if (isa_supported(Isa::kAvx2)) return Isa::kAvx2;
  if (isa_supported(Isa::kNeon)) return Isa::kNeon;
  return Isa::kScalar;
}

std::atomic<Isa>& ActiveIsaSlot() {
  static std::atomic<Isa> slot{DetectIsa()};
  return slot;
}

void CheckSize(std::size_t expected, std::size_t actual, const char* what) {
  if (expected != actual) {
    throw Error(std::string("simd kernel size mismatch: ") + what);
  }
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
    case Isa::kNeon: return "neon";
  }
  return "unknown";
}

std::optional<Isa> parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::kScalar;
  if (name == "avx2") return Isa::kAvx2;
  if (name == "neon") return Isa::kNeon;
  return std::nullopt;
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
#if defined(AUDIOZOOM_HAVE_AVX2_KERNELS)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::kNeon:
#if defined(AUDIOZOOM_HAVE_NEON_KERNELS)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return ActiveIsaSlot().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw Error("instruction set '" + std::string(isa_name(isa)) +
                "' is not available");
  }
  ActiveIsaSlot().store(isa, std::memory_order_relaxed);
}

const KernelTable& kernel_table(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return kScalarKernels;
#if defined(AUDIOZOOM_HAVE_AVX2_KERNELS)
    case Isa::kAvx2:
      return kAvx2Kernels;
#endif
#if defined(AUDIOZOOM_HAVE_NEON_KERNELS)
    case Isa::kNeon:
      return kNeonKernels;
#endif
    default:
      break;
  }
  throw Error("instruction set '" + std::string(isa_name(isa)) +
              "' is not compiled in");
}

const KernelTable& active_kernels() { return kernel_table(active_isa()); }

void half_sum(std::span<const double> a, std::span<const double> b,
              std::span<double> out) {
  CheckSize(a.size(), b.size(), "half_sum");
  CheckSize(a.size(), out.size(), "half_sum");
  active_kernels().half_sum(a.data(), b.data(), out.data(), a.size());
}

void difference(std::span<const double> a, std::span<const double> b,
                std::span<double> out) {
  CheckSize(a.size(), b.size(), "difference");
  CheckSize(a.size(), out.size(), "difference");
  active_kernels().difference(a.data(), b.data(), out.data(), a.size());
}

void beamform2(std::span<const Complex> w1, std::span<const Complex> w2,
               std::span<const Complex> y1, std::span<const Complex> y2,
               std::span<Complex> out) {
  const std::size_t n = out.size();
  CheckSize(n, w1.size(), "beamform2");
  CheckSize(n, w2.size(), "beamform2");
  CheckSize(n, y1.size(), "beamform2");
  CheckSize(n, y2.size(), "beamform2");
  active_kernels().beamform2(w1.data(), w2.data(), y1.data(), y2.data(),
                             out.data(), n);
}

void accumulate_covariance(std::span<const Complex> y1,
                           std::span<const Complex> y2, std::span<double> r11,
                           std::span<double> r22, std::span<Complex> r12) {
  const std::size_t n = y1.size();
  CheckSize(n, y2.size(), "accumulate_covariance");
  CheckSize(n, r11.size(), "accumulate_covariance");
  CheckSize(n, r22.size(), "accumulate_covariance");
  CheckSize(n, r12.size(), "accumulate_covariance");
  active_kernels().accumulate_covariance(y1.data(), y2.data(), r11.data(),
                                         r22.data(), r12.data(), n);
}

void residual_variance(std::span<const Complex> y1, std::span<const Complex> y2,
                       std::span<const Complex> z, std::span<double> out) {
  const std::size_t n = out.size();
  CheckSize(n, y1.size(), "residual_variance");
  CheckSize(n, y2.size(), "residual_variance");
  CheckSize(n, z.size(), "residual_variance");
  active_kernels().residual_variance(y1.data(), y2.data(), z.data(),
                                     out.data(), n);
}

void apply_gain(std::span<const double> g, std::span<const Complex> z,
                std::span<Complex> out) {
  CheckSize(g.size(), z.size(), "apply_gain");
  CheckSize(g.size(), out.size(), "apply_gain");
  active_kernels().apply_gain(g.data(), z.data(), out.data(), g.size());
}

void power(std::span<const Complex> z, std::span<double> out) {
  CheckSize(z.size(), out.size(), "power");
  active_kernels().power(z.data(), out.data(), z.size());
}

void complex_multiply(std::span<const Complex> a, std::span<const Complex> b,
                      std::span<Complex> out) {
  CheckSize(a.size(), b.size(), "complex_multiply");
  CheckSize(a.size(), out.size(), "complex_multiply");
  active_kernels().complex_multiply(a.data(), b.data(), out.data(), a.size());
}

void conj_multiply_scaled(std::span<const Complex> a,
                          std::span<const Complex> b,
                          std::span<const double> scale,
                          std::span<Complex> out) {
  CheckSize(a.size(), b.size(), "conj_multiply_scaled");
  CheckSize(a.size(), scale.size(), "conj_multiply_scaled");
  CheckSize(a.size(), out.size(), "conj_multiply_scaled");
  active_kernels().conj_multiply_scaled(a.data(), b.data(), scale.data(),
                                        out.data(), a.size());
}

void smooth_power(std::span<const Complex> x, double lambda,
                  std::span<double> p) {
  CheckSize(x.size(), p.size(), "smooth_power");
  active_kernels().smooth_power(x.data(), lambda, p.data(), x.size());
}

double sum_squares(std::span<const double> a) {
  return active_kernels().sum_squares(a.data(), a.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
  CheckSize(a.size(), b.size(), "dot");
  return active_kernels().dot(a.data(), b.data(), a.size());
}

}  // namespace azoom::simd
