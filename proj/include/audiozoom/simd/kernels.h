#ifndef AUDIOZOOM_SIMD_KERNELS_H_
#define AUDIOZOOM_SIMD_KERNELS_H_

// Data-parallel inner loops of the pipeline. Every kernel has a scalar
// reference implementation and, where the target supports it, an AVX2 (x86)
// or NEON (aarch64) variant. The variant is picked once at startup from the
// CPU's capabilities and can be overridden with the AUDIOZOOM_ISA environment
// variable ("scalar", "avx2", "neon") or set_active_isa().
//
// Element-wise kernels perform the same floating-point operations in the same
// order in every variant and are bit-identical across ISAs. Reductions
// (sum_squares, dot) use several accumulators in the vector variants and
// agree with the scalar reference to rounding only.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace azoom::simd {

using Complex = std::complex<double>;

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);
std::optional<Isa> parse_isa(std::string_view name);
bool isa_supported(Isa isa);
Isa active_isa();
// Throws azoom::Error when the ISA is not available on this machine.
void set_active_isa(Isa isa);

struct KernelTable {
  // out = (a + b) * 0.5
  void (*half_sum)(const double* a, const double* b, double* out,
                   std::size_t n);
  // out = a - b
  void (*difference)(const double* a, const double* b, double* out,
                     std::size_t n);
  // out = conj(w1) * y1 + conj(w2) * y2
  void (*beamform2)(const Complex* w1, const Complex* w2, const Complex* y1,
                    const Complex* y2, Complex* out, std::size_t n);
  // r11 += |y1|^2, r22 += |y2|^2, r12 += y1 * conj(y2)
  void (*accumulate_covariance)(const Complex* y1, const Complex* y2,
                                double* r11, double* r22, Complex* r12,
                                std::size_t n);
  // out = 0.5 * (|y1 - z|^2 + |y2 - z|^2)
  void (*residual_variance)(const Complex* y1, const Complex* y2,
                            const Complex* z, double* out, std::size_t n);
  // out = g * z
  void (*apply_gain)(const double* g, const Complex* z, Complex* out,
                     std::size_t n);
  // out = |z|^2
  void (*power)(const Complex* z, double* out, std::size_t n);
  // out = a * b
  void (*complex_multiply)(const Complex* a, const Complex* b, Complex* out,
                           std::size_t n);
  // out = conj(a) * b * scale
  void (*conj_multiply_scaled)(const Complex* a, const Complex* b,
                               const double* scale, Complex* out,
                               std::size_t n);
  // p = lambda * p + (1 - lambda) * |x|^2
  void (*smooth_power)(const Complex* x, double lambda, double* p,
                       std::size_t n);
  double (*sum_squares)(const double* a, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
};

// Throws azoom::Error when the ISA is not compiled in.
const KernelTable& kernel_table(Isa isa);
const KernelTable& active_kernels();

// Size-checked entry points using the active kernel table.
void half_sum(std::span<const double> a, std::span<const double> b,
              std::span<double> out);
void difference(std::span<const double> a, std::span<const double> b,
                std::span<double> out);
void beamform2(std::span<const Complex> w1, std::span<const Complex> w2,
               std::span<const Complex> y1, std::span<const Complex> y2,
               std::span<Complex> out);
void accumulate_covariance(std::span<const Complex> y1,
                           std::span<const Complex> y2, std::span<double> r11,
                           std::span<double> r22, std::span<Complex> r12);
void residual_variance(std::span<const Complex> y1, std::span<const Complex> y2,
                       std::span<const Complex> z, std::span<double> out);
void apply_gain(std::span<const double> g, std::span<const Complex> z,
                std::span<Complex> out);
void power(std::span<const Complex> z, std::span<double> out);
void complex_multiply(std::span<const Complex> a, std::span<const Complex> b,
                      std::span<Complex> out);
void conj_multiply_scaled(std::span<const Complex> a,
                          std::span<const Complex> b,
                          std::span<const double> scale,
                          std::span<Complex> out);
void smooth_power(std::span<const Complex> x, double lambda,
                  std::span<double> p);
double sum_squares(std::span<const double> a);
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace azoom::simd

#endif  // AUDIOZOOM_SIMD_KERNELS_H_
