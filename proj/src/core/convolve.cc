#include "audiozoom/convolve.h"

#include <algorithm>
#include <complex>

#include "audiozoom/error.h"
#include "audiozoom/fft.h"
#include "audiozoom/simd/kernels.h"

namespace azoom {
namespace {

std::size_t NextPowerOfTwo(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

std::vector<double> fft_convolve(std::span<const double> signal,
                                 std::span<const double> kernel) {
  if (kernel.empty()) throw Error("convolution kernel is empty");
  if (signal.empty()) return {};
  const std::size_t out_len = signal.size() + kernel.size() - 1;
  const std::size_t n = NextPowerOfTwo(out_len);
  RealFft fft(n);
  std::vector<double> buf(n, 0.0);
  std::vector<std::complex<double>> a(fft.bins()), b(fft.bins());
  std::copy(signal.begin(), signal.end(), buf.begin());
  fft.forward(buf, a);
  std::fill(buf.begin(), buf.end(), 0.0);
  std::copy(kernel.begin(), kernel.end(), buf.begin());
  fft.forward(buf, b);
  simd::complex_multiply(a, b, a);
  fft.inverse(a, buf);
  buf.resize(out_len);
  return buf;
}

std::vector<double> fft_cross_correlation(std::span<const double> a,
                                          std::span<const double> b,
                                          std::size_t max_lag) {
  std::vector<double> out(2 * max_lag + 1, 0.0);
  if (a.empty() || b.empty()) return out;
  // Zero padding by max_lag on top of the full linear length avoids any
  // circular wrap for the lags we keep.
  const std::size_t n = NextPowerOfTwo(a.size() + b.size() + max_lag);
  RealFft fft(n);
  std::vector<double> buf(n, 0.0);
  std::vector<std::complex<double>> fa(fft.bins()), fb(fft.bins());
  std::copy(a.begin(), a.end(), buf.begin());
  fft.forward(buf, fa);
  std::fill(buf.begin(), buf.end(), 0.0);
  std::copy(b.begin(), b.end(), buf.begin());
  fft.forward(buf, fb);
  // conj(B) * A is the transform of c[k] = sum_n a[n + k] b[n].
  std::vector<double> ones(fft.bins(), 1.0);
  simd::conj_multiply_scaled(fb, fa, ones, fa);
  fft.inverse(fa, buf);
  for (std::size_t i = 0; i <= 2 * max_lag; ++i) {
    const long long lag = static_cast<long long>(i) - static_cast<long long>(max_lag);
    const std::size_t idx = lag >= 0 ? static_cast<std::size_t>(lag)
                                     : n - static_cast<std::size_t>(-lag);
    out[i] = buf[idx];
  }
  return out;
}

}  // namespace azoom
