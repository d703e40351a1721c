#ifndef AUDIOZOOM_CONVOLVE_H_
#define AUDIOZOOM_CONVOLVE_H_

#include <span>
#include <vector>

namespace azoom {

// Full linear convolution via zero-padded FFTs; the result has
// signal.size() + kernel.size() - 1 samples. Throws on an empty kernel.
std::vector<double> fft_convolve(std::span<const double> signal,
                                 std::span<const double> kernel);

// Cross-correlation c[k] = sum_n a[n + k] * b[n] for lags
// k in [-max_lag, max_lag], returned with index k + max_lag.
std::vector<double> fft_cross_correlation(std::span<const double> a,
                                          std::span<const double> b,
                                          std::size_t max_lag);

}  // namespace azoom

#endif  // AUDIOZOOM_CONVOLVE_H_
