#ifndef AUDIOZOOM_STFT_H_
#define AUDIOZOOM_STFT_H_

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "audiozoom/audio_buffer.h"

namespace azoom {

enum class WindowType { kHann, kSqrtHann, kRect };

std::string_view window_name(WindowType type);
// Accepts "hann", "sqrt_hann", "rect". Throws azoom::Error otherwise.
WindowType parse_window(std::string_view name);

struct StftParams {
  std::size_t frame_length = 512;
  std::size_t hop_length = 256;
  WindowType window = WindowType::kSqrtHann;

  // Throws unless frame_length is a power of two and hop_length divides it.
  void validate() const;
  std::size_t bins() const { return frame_length / 2 + 1; }
};

// Periodic analysis window.
std::vector<double> analysis_window(WindowType type, std::size_t length);
// Window applied on overlap-add: rect for hann and rect, sqrt-hann for
// sqrt-hann, so that analysis * synthesis is hann or rect.
std::vector<double> synthesis_window(WindowType type, std::size_t length);

// True when sum_k analysis(n - kH) * synthesis(n - kH) is constant in n.
bool satisfies_cola(const StftParams& params);

// Real-valued time-frequency map (variance estimates, gains, SINR), laid out
// like Spectrogram.
class TfMap {
 public:
  TfMap() = default;
  TfMap(std::size_t bins, std::size_t frames, double fill = 0.0);

  std::size_t bins() const { return bins_; }
  std::size_t frames() const { return frames_; }
  double& at(std::size_t bin, std::size_t frame) {
    return values_[frame * bins_ + bin];
  }
  double at(std::size_t bin, std::size_t frame) const {
    return values_[frame * bins_ + bin];
  }
  std::span<double> frame(std::size_t index) {
    return {values_.data() + index * bins_, bins_};
  }
  std::span<const double> frame(std::size_t index) const {
    return {values_.data() + index * bins_, bins_};
  }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

 private:
  std::size_t bins_ = 0;
  std::size_t frames_ = 0;
  std::vector<double> values_;
};

// One-sided STFT coefficients of a single channel, indexed [bin][frame] and
// stored frame-major so each frame's bins are contiguous.
class Spectrogram {
 public:
  Spectrogram() = default;
  // bins must equal params.bins(). signal_length is the number of samples
  // istft() returns; leading_padding samples are dropped from its front.
  Spectrogram(std::size_t frames, const StftParams& params, int sample_rate,
              std::size_t signal_length, std::size_t leading_padding = 0);

  std::size_t bins() const { return bins_; }
  std::size_t frames() const { return frames_; }
  const StftParams& params() const { return params_; }
  int sample_rate() const { return sample_rate_; }
  std::size_t signal_length() const { return signal_length_; }
  std::size_t leading_padding() const { return leading_padding_; }

  std::complex<double>& at(std::size_t bin, std::size_t frame) {
    return coefficients_[frame * bins_ + bin];
  }
  const std::complex<double>& at(std::size_t bin, std::size_t frame) const {
    return coefficients_[frame * bins_ + bin];
  }
  std::span<std::complex<double>> frame(std::size_t index) {
    return {coefficients_.data() + index * bins_, bins_};
  }
  std::span<const std::complex<double>> frame(std::size_t index) const {
    return {coefficients_.data() + index * bins_, bins_};
  }
  std::span<std::complex<double>> coefficients() { return coefficients_; }
  std::span<const std::complex<double>> coefficients() const {
    return coefficients_;
  }

  bool same_shape(const Spectrogram& other) const {
    return bins_ == other.bins_ && frames_ == other.frames_;
  }
  bool same_shape(const TfMap& map) const {
    return bins_ == map.bins() && frames_ == map.frames();
  }

 private:
  std::size_t bins_ = 0;
  std::size_t frames_ = 0;
  StftParams params_;
  int sample_rate_ = 0;
  std::size_t signal_length_ = 0;
  std::size_t leading_padding_ = 0;
  std::vector<std::complex<double>> coefficients_;
};

// Frame v covers samples [v*hop, v*hop + frame_length). The tail is
// zero-padded so the final partial frame is analyzed. Requires a mono signal
// of at least frame_length samples ("insufficient samples" otherwise).
Spectrogram stft(const AudioBuffer& signal, const StftParams& params);

// stft() of the signal with frame_length - hop_length zeros added at both
// ends, so every original sample is interior. istft() strips the padding.
Spectrogram stft_padded(const AudioBuffer& signal, const StftParams& params);

// Weighted overlap-add synthesis. Throws "window does not satisfy COLA" for
// window/hop pairs without constant overlap-add.
AudioBuffer istft(const Spectrogram& spec);

// |X|^2 per coefficient.
TfMap power_map(const Spectrogram& spec);

}  // namespace azoom

#endif  // AUDIOZOOM_STFT_H_
