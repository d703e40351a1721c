// Reference implementations. The vector variants reproduce these operation
// sequences exactly for every element-wise kernel.

#include "simd/kernel_variants.h"

namespace azoom::simd {
namespace {

void HalfSum(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = (a[i] + b[i]) * 0.5;
}

void Difference(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

// conj(w) * y, written out so the operation order is explicit.
inline void ConjMul(double wr, double wi, double yr, double yi, double* re,
                    double* im) {
  *re = wr * yr + wi * yi;
  *im = wr * yi - wi * yr;
}

void Beamform2(const Complex* w1, const Complex* w2, const Complex* y1,
               const Complex* y2, Complex* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double ar, ai, br, bi;
    ConjMul(w1[i].real(), w1[i].imag(), y1[i].real(), y1[i].imag(), &ar, &ai);
    ConjMul(w2[i].real(), w2[i].imag(), y2[i].real(), y2[i].imag(), &br, &bi);
    out[i] = Complex(ar + br, ai + bi);
  }
}

void AccumulateCovariance(const Complex* y1, const Complex* y2, double* r11,
                          double* r22, Complex* r12, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = y1[i].real(), ai = y1[i].imag();
    const double br = y2[i].real(), bi = y2[i].imag();
    r11[i] += ar * ar + ai * ai;
    r22[i] += br * br + bi * bi;
    double cr, ci;
    ConjMul(br, bi, ar, ai, &cr, &ci);
    r12[i] = Complex(r12[i].real() + cr, r12[i].imag() + ci);
  }
}

void ResidualVariance(const Complex* y1, const Complex* y2, const Complex* z,
                      double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = y1[i].real() - z[i].real();
    const double ai = y1[i].imag() - z[i].imag();
    const double br = y2[i].real() - z[i].real();
    const double bi = y2[i].imag() - z[i].imag();
    out[i] = ((ar * ar + ai * ai) + (br * br + bi * bi)) * 0.5;
  }
}

void ApplyGain(const double* g, const Complex* z, Complex* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = Complex(g[i] * z[i].real(), g[i] * z[i].imag());
  }
}

void Power(const Complex* z, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
  }
}

void ComplexMultiply(const Complex* a, const Complex* b, Complex* out,
                     std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    out[i] = Complex(ar * br - ai * bi, ar * bi + ai * br);
  }
}

void ConjMultiplyScaled(const Complex* a, const Complex* b,
                        const double* scale, Complex* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double re, im;
    ConjMul(a[i].real(), a[i].imag(), b[i].real(), b[i].imag(), &re, &im);
    out[i] = Complex(re * scale[i], im * scale[i]);
  }
}

void SmoothPower(const Complex* x, double lambda, double* p, std::size_t n) {
  const double rest = 1.0 - lambda;
  for (std::size_t i = 0; i < n; ++i) {
    const double mag2 = x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    p[i] = lambda * p[i] + rest * mag2;
  }
}

double SumSquares(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

double Dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

const KernelTable kScalarKernels = {
    HalfSum,          Difference,        Beamform2,
    AccumulateCovariance, ResidualVariance, ApplyGain,
    Power,            ComplexMultiply,   ConjMultiplyScaled,
    SmoothPower,      SumSquares,        Dot,
};

}  // namespace azoom::simd
