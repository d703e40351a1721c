#ifndef AUDIOZOOM_FFT_H_
#define AUDIOZOOM_FFT_H_

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace azoom {

// Real-input DFT of a fixed size, backed by FFTW. forward() is unnormalized;
// inverse() applies the 1/N factor so inverse(forward(x)) == x.
//
// An instance owns scratch buffers and must not be used from two threads at
// once. Separate instances are independent.
class RealFft {
 public:
  explicit RealFft(std::size_t size);
  ~RealFft();
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return size_; }
  std::size_t bins() const { return size_ / 2 + 1; }

  // in.size() == size(), out.size() == bins()
  void forward(std::span<const double> in, std::span<std::complex<double>> out);
  // in.size() == bins(), out.size() == size()
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  struct Plans;
  std::size_t size_ = 0;
  std::unique_ptr<Plans> plans_;
};

}  // namespace azoom

#endif  // AUDIOZOOM_FFT_H_
