// NEON variants for aarch64. One complex value per float64x2_t; operation
// order follows the scalar reference.

#include <arm_neon.h>

#include "simd/kernel_variants.h"

namespace azoom::simd {
namespace {

inline const double* Raw(const Complex* p) {
  return reinterpret_cast<const double*>(p);
}
inline double* Raw(Complex* p) { return reinterpret_cast<double*>(p); }

// conj(w) * y = [wr*yr + wi*yi, wr*yi - wi*yr]
inline float64x2_t ConjMul(float64x2_t w, float64x2_t y) {
  const float64x2_t wr = vdupq_laneq_f64(w, 0);
  const float64x2_t wi = vdupq_laneq_f64(w, 1);
  const float64x2_t t1 = vmulq_f64(wr, y);
  const float64x2_t t2 = vmulq_f64(wi, vextq_f64(y, y, 1));
  const float64x2_t sign = {1.0, -1.0};
  return vaddq_f64(t1, vmulq_f64(t2, sign));
}

// a * b = [ar*br - ai*bi, ar*bi + ai*br]
inline float64x2_t Mul(float64x2_t a, float64x2_t b) {
  const float64x2_t ar = vdupq_laneq_f64(a, 0);
  const float64x2_t ai = vdupq_laneq_f64(a, 1);
  const float64x2_t t1 = vmulq_f64(ar, b);
  const float64x2_t t2 = vmulq_f64(ai, vextq_f64(b, b, 1));
  const float64x2_t sign = {-1.0, 1.0};
  return vaddq_f64(t1, vmulq_f64(t2, sign));
}

// [|z0|^2, |z1|^2]
inline float64x2_t Magnitude2(float64x2_t z0, float64x2_t z1) {
  return vpaddq_f64(vmulq_f64(z0, z0), vmulq_f64(z1, z1));
}

void HalfSum(const double* a, const double* b, double* out, std::size_t n) {
  const float64x2_t half = vdupq_n_f64(0.5);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out + i, vmulq_f64(vaddq_f64(vld1q_f64(a + i), vld1q_f64(b + i)), half));
  }
  for (; i < n; ++i) out[i] = (a[i] + b[i]) * 0.5;
}

void Difference(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out + i, vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

void Beamform2(const Complex* w1, const Complex* w2, const Complex* y1,
               const Complex* y2, Complex* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t a = ConjMul(vld1q_f64(Raw(w1 + i)), vld1q_f64(Raw(y1 + i)));
    const float64x2_t b = ConjMul(vld1q_f64(Raw(w2 + i)), vld1q_f64(Raw(y2 + i)));
    vst1q_f64(Raw(out + i), vaddq_f64(a, b));
  }
}

void AccumulateCovariance(const Complex* y1, const Complex* y2, double* r11,
                          double* r22, Complex* r12, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t a0 = vld1q_f64(Raw(y1 + i));
    const float64x2_t a1 = vld1q_f64(Raw(y1 + i + 1));
    const float64x2_t b0 = vld1q_f64(Raw(y2 + i));
    const float64x2_t b1 = vld1q_f64(Raw(y2 + i + 1));
    vst1q_f64(r11 + i, vaddq_f64(vld1q_f64(r11 + i), Magnitude2(a0, a1)));
    vst1q_f64(r22 + i, vaddq_f64(vld1q_f64(r22 + i), Magnitude2(b0, b1)));
    double* c = Raw(r12 + i);
    vst1q_f64(c, vaddq_f64(vld1q_f64(c), ConjMul(b0, a0)));
    vst1q_f64(c + 2, vaddq_f64(vld1q_f64(c + 2), ConjMul(b1, a1)));
  }
  if (i < n) {
    kScalarKernels.accumulate_covariance(y1 + i, y2 + i, r11 + i, r22 + i, r12 + i, n - i);
  }
}

void ResidualVariance(const Complex* y1, const Complex* y2, const Complex* z,
                      double* out, std::size_t n) {
  const float64x2_t half = vdupq_n_f64(0.5);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t z0 = vld1q_f64(Raw(z + i));
    const float64x2_t z1 = vld1q_f64(Raw(z + i + 1));
    const float64x2_t a = Magnitude2(vsubq_f64(vld1q_f64(Raw(y1 + i)), z0),
                                     vsubq_f64(vld1q_f64(Raw(y1 + i + 1)), z1));
    const float64x2_t b = Magnitude2(vsubq_f64(vld1q_f64(Raw(y2 + i)), z0),
                                     vsubq_f64(vld1q_f64(Raw(y2 + i + 1)), z1));
    vst1q_f64(out + i, vmulq_f64(vaddq_f64(a, b), half));
  }
  if (i < n) kScalarKernels.residual_variance(y1 + i, y2 + i, z + i, out + i, n - i);
}

void ApplyGain(const double* g, const Complex* z, Complex* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    vst1q_f64(Raw(out + i), vmulq_f64(vdupq_n_f64(g[i]), vld1q_f64(Raw(z + i))));
  }
}

void Power(const Complex* z, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(out + i, Magnitude2(vld1q_f64(Raw(z + i)), vld1q_f64(Raw(z + i + 1))));
  }
  if (i < n) kScalarKernels.power(z + i, out + i, n - i);
}

void ComplexMultiply(const Complex* a, const Complex* b, Complex* out,
                     std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    vst1q_f64(Raw(out + i), Mul(vld1q_f64(Raw(a + i)), vld1q_f64(Raw(b + i))));
  }
}

void ConjMultiplyScaled(const Complex* a, const Complex* b,
                        const double* scale, Complex* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const float64x2_t c = ConjMul(vld1q_f64(Raw(a + i)), vld1q_f64(Raw(b + i)));
    vst1q_f64(Raw(out + i), vmulq_f64(c, vdupq_n_f64(scale[i])));
  }
}

void SmoothPower(const Complex* x, double lambda, double* p, std::size_t n) {
  const float64x2_t l = vdupq_n_f64(lambda);
  const float64x2_t rest = vdupq_n_f64(1.0 - lambda);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t m = Magnitude2(vld1q_f64(Raw(x + i)), vld1q_f64(Raw(x + i + 1)));
    vst1q_f64(p + i, vaddq_f64(vmulq_f64(l, vld1q_f64(p + i)), vmulq_f64(rest, m)));
  }
  if (i < n) kScalarKernels.smooth_power(x + i, lambda, p + i, n - i);
}

double SumSquares(const double* a, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float64x2_t x0 = vld1q_f64(a + i);
    const float64x2_t x1 = vld1q_f64(a + i + 2);
    acc0 = vaddq_f64(acc0, vmulq_f64(x0, x0));
    acc1 = vaddq_f64(acc1, vmulq_f64(x1, x1));
  }
  double total = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) total += a[i] * a[i];
  return total;
}

double Dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vaddq_f64(acc0, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    acc1 = vaddq_f64(acc1, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double total = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

}  // namespace

const KernelTable kNeonKernels = {
    HalfSum,          Difference,        Beamform2,
    AccumulateCovariance, ResidualVariance, ApplyGain,
    Power,            ComplexMultiply,   ConjMultiplyScaled,
    SmoothPower,      SumSquares,        Dot,
};

}  // namespace azoom::simd
