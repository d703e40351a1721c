// AVX2 variants. Compiled with -mavx2 only (no FMA) so that every
// element-wise kernel matches the scalar reference bit for bit. Complex
// values are interleaved (re, im), two per 256-bit register.

#include <immintrin.h>

#include "simd/kernel_variants.h"

namespace azoom::simd {
namespace {

inline const double* Raw(const Complex* p) {
  return reinterpret_cast<const double*>(p);
}
inline double* Raw(Complex* p) { return reinterpret_cast<double*>(p); }

// conj(w) * y for two complex values: [wr*yr + wi*yi, wr*yi - wi*yr].
inline __m256d ConjMul(__m256d w, __m256d y) {
  const __m256d wr = _mm256_movedup_pd(w);
  const __m256d wi = _mm256_permute_pd(w, 0xF);
  const __m256d y_swap = _mm256_permute_pd(y, 0x5);
  const __m256d t1 = _mm256_mul_pd(wr, y);
  const __m256d t2 = _mm256_mul_pd(wi, y_swap);
  const __m256d neg = _mm256_set1_pd(-0.0);
  return _mm256_addsub_pd(t1, _mm256_xor_pd(t2, neg));
}

// a * b for two complex values: [ar*br - ai*bi, ar*bi + ai*br].
inline __m256d Mul(__m256d a, __m256d b) {
  const __m256d ar = _mm256_movedup_pd(a);
  const __m256d ai = _mm256_permute_pd(a, 0xF);
  const __m256d b_swap = _mm256_permute_pd(b, 0x5);
  return _mm256_addsub_pd(_mm256_mul_pd(ar, b), _mm256_mul_pd(ai, b_swap));
}

// |z|^2 of four complex values held in two registers, in input order.
inline __m256d Magnitude2(__m256d lo, __m256d hi) {
  const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(lo, lo), _mm256_mul_pd(hi, hi));
  return _mm256_permute4x64_pd(h, 0xD8);
}

// [g0, g0, g1, g1] from two consecutive reals.
inline __m256d Duplicate2(const double* g) {
  const __m256d v = _mm256_castpd128_pd256(_mm_loadu_pd(g));
  return _mm256_permute4x64_pd(v, 0x50);
}

inline double HorizontalSum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void HalfSum(const double* a, const double* b, double* out, std::size_t n) {
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d s = _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(s, half));
  }
  for (; i < n; ++i) out[i] = (a[i] + b[i]) * 0.5;
}

void Difference(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i),
                                            _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

void Beamform2(const Complex* w1, const Complex* w2, const Complex* y1,
               const Complex* y2, Complex* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d a = ConjMul(_mm256_loadu_pd(Raw(w1 + i)), _mm256_loadu_pd(Raw(y1 + i)));
    const __m256d b = ConjMul(_mm256_loadu_pd(Raw(w2 + i)), _mm256_loadu_pd(Raw(y2 + i)));
    _mm256_storeu_pd(Raw(out + i), _mm256_add_pd(a, b));
  }
  if (i < n) kScalarKernels.beamform2(w1 + i, w2 + i, y1 + i, y2 + i, out + i, n - i);
}

void AccumulateCovariance(const Complex* y1, const Complex* y2, double* r11,
                          double* r22, Complex* r12, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a_lo = _mm256_loadu_pd(Raw(y1 + i));
    const __m256d a_hi = _mm256_loadu_pd(Raw(y1 + i + 2));
    const __m256d b_lo = _mm256_loadu_pd(Raw(y2 + i));
    const __m256d b_hi = _mm256_loadu_pd(Raw(y2 + i + 2));
    _mm256_storeu_pd(r11 + i, _mm256_add_pd(_mm256_loadu_pd(r11 + i), Magnitude2(a_lo, a_hi)));
    _mm256_storeu_pd(r22 + i, _mm256_add_pd(_mm256_loadu_pd(r22 + i), Magnitude2(b_lo, b_hi)));
    double* c = Raw(r12 + i);
    _mm256_storeu_pd(c, _mm256_add_pd(_mm256_loadu_pd(c), ConjMul(b_lo, a_lo)));
    _mm256_storeu_pd(c + 4, _mm256_add_pd(_mm256_loadu_pd(c + 4), ConjMul(b_hi, a_hi)));
  }
  if (i < n) {
    kScalarKernels.accumulate_covariance(y1 + i, y2 + i, r11 + i, r22 + i, r12 + i, n - i);
  }
}

void ResidualVariance(const Complex* y1, const Complex* y2, const Complex* z,
                      double* out, std::size_t n) {
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d z_lo = _mm256_loadu_pd(Raw(z + i));
    const __m256d z_hi = _mm256_loadu_pd(Raw(z + i + 2));
    const __m256d a_lo = _mm256_sub_pd(_mm256_loadu_pd(Raw(y1 + i)), z_lo);
    const __m256d a_hi = _mm256_sub_pd(_mm256_loadu_pd(Raw(y1 + i + 2)), z_hi);
    const __m256d b_lo = _mm256_sub_pd(_mm256_loadu_pd(Raw(y2 + i)), z_lo);
    const __m256d b_hi = _mm256_sub_pd(_mm256_loadu_pd(Raw(y2 + i + 2)), z_hi);
    // [|a0|^2, |b0|^2, |a1|^2, |b1|^2] and likewise for elements 2, 3.
    const __m256d p_lo = _mm256_hadd_pd(_mm256_mul_pd(a_lo, a_lo), _mm256_mul_pd(b_lo, b_lo));
    const __m256d p_hi = _mm256_hadd_pd(_mm256_mul_pd(a_hi, a_hi), _mm256_mul_pd(b_hi, b_hi));
    const __m256d s = _mm256_permute4x64_pd(_mm256_hadd_pd(p_lo, p_hi), 0xD8);
    _mm256_storeu_pd(out + i, _mm256_mul_pd(s, half));
  }
  if (i < n) kScalarKernels.residual_variance(y1 + i, y2 + i, z + i, out + i, n - i);
}

void ApplyGain(const double* g, const Complex* z, Complex* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    _mm256_storeu_pd(Raw(out + i), _mm256_mul_pd(Duplicate2(g + i), _mm256_loadu_pd(Raw(z + i))));
  }
  if (i < n) kScalarKernels.apply_gain(g + i, z + i, out + i, n - i);
}

void Power(const Complex* z, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, Magnitude2(_mm256_loadu_pd(Raw(z + i)),
                                         _mm256_loadu_pd(Raw(z + i + 2))));
  }
  if (i < n) kScalarKernels.power(z + i, out + i, n - i);
}

void ComplexMultiply(const Complex* a, const Complex* b, Complex* out,
                     std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    _mm256_storeu_pd(Raw(out + i), Mul(_mm256_loadu_pd(Raw(a + i)), _mm256_loadu_pd(Raw(b + i))));
  }
  if (i < n) kScalarKernels.complex_multiply(a + i, b + i, out + i, n - i);
}

void ConjMultiplyScaled(const Complex* a, const Complex* b,
                        const double* scale, Complex* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d c = ConjMul(_mm256_loadu_pd(Raw(a + i)), _mm256_loadu_pd(Raw(b + i)));
    _mm256_storeu_pd(Raw(out + i), _mm256_mul_pd(c, Duplicate2(scale + i)));
  }
  if (i < n) kScalarKernels.conj_multiply_scaled(a + i, b + i, scale + i, out + i, n - i);
}

void SmoothPower(const Complex* x, double lambda, double* p, std::size_t n) {
  const __m256d l = _mm256_set1_pd(lambda);
  const __m256d rest = _mm256_set1_pd(1.0 - lambda);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d m = Magnitude2(_mm256_loadu_pd(Raw(x + i)), _mm256_loadu_pd(Raw(x + i + 2)));
    const __m256d v = _mm256_add_pd(_mm256_mul_pd(l, _mm256_loadu_pd(p + i)), _mm256_mul_pd(rest, m));
    _mm256_storeu_pd(p + i, v);
  }
  if (i < n) kScalarKernels.smooth_power(x + i, lambda, p + i, n - i);
}

double SumSquares(const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d x0 = _mm256_loadu_pd(a + i);
    const __m256d x1 = _mm256_loadu_pd(a + i + 4);
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(x0, x0));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(x1, x1));
  }
  double total = HorizontalSum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) total += a[i] * a[i];
  return total;
}

double Dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  double total = HorizontalSum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

}  // namespace

const KernelTable kAvx2Kernels = {
    HalfSum,          Difference,        Beamform2,
    AccumulateCovariance, ResidualVariance, ApplyGain,
    Power,            ComplexMultiply,   ConjMultiplyScaled,
    SmoothPower,      SumSquares,        Dot,
};

}  // namespace azoom::simd
