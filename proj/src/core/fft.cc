#include "audiozoom/fft.h"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "audiozoom/error.h"

namespace azoom {
namespace {

// The FFTW planner is not thread-safe; plan execution is.
std::mutex& PlannerMutex() {
  static std::mutex mutex;
  return mutex;
}

}  // namespace

struct RealFft::Plans {
  double* time = nullptr;
  fftw_complex* freq = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;

  ~Plans() {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    if (forward) fftw_destroy_plan(forward);
    if (inverse) fftw_destroy_plan(inverse);
    fftw_free(time);
    fftw_free(freq);
  }
};

RealFft::RealFft(std::size_t size) : size_(size), plans_(new Plans) {
  if (size == 0) throw Error("FFT size must be positive");
  const int n = static_cast<int>(size);
  plans_->time = fftw_alloc_real(size);
  plans_->freq = fftw_alloc_complex(bins());
  if (!plans_->time || !plans_->freq) throw Error("FFT allocation failed");
  std::lock_guard<std::mutex> lock(PlannerMutex());
  plans_->forward =
      fftw_plan_dft_r2c_1d(n, plans_->time, plans_->freq, FFTW_ESTIMATE);
  plans_->inverse =
      fftw_plan_dft_c2r_1d(n, plans_->freq, plans_->time, FFTW_ESTIMATE);
  if (!plans_->forward || !plans_->inverse) throw Error("FFT planning failed");
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::forward(std::span<const double> in,
                      std::span<std::complex<double>> out) {
  if (in.size() != size_ || out.size() != bins()) {
    throw Error("RealFft::forward size mismatch");
  }
  std::copy(in.begin(), in.end(), plans_->time);
  fftw_execute(plans_->forward);
  const auto* freq = reinterpret_cast<const std::complex<double>*>(plans_->freq);
  std::copy(freq, freq + bins(), out.begin());
}

void RealFft::inverse(std::span<const std::complex<double>> in,
                      std::span<double> out) {
  if (in.size() != bins() || out.size() != size_) {
    throw Error("RealFft::inverse size mismatch");
  }
  auto* freq = reinterpret_cast<std::complex<double>*>(plans_->freq);
  std::copy(in.begin(), in.end(), freq);
  // c2r ignores the imaginary parts of DC and Nyquist.
  fftw_execute(plans_->inverse);
  const double scale = 1.0 / static_cast<double>(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i] = plans_->time[i] * scale;
}

}  // namespace azoom
