#include "audiozoom/stft.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "audiozoom/error.h"
#include "audiozoom/fft.h"
#include "audiozoom/simd/kernels.h"

namespace azoom {

std::string_view window_name(WindowType type) {
  switch (type) {
    case WindowType::kHann: return "hann";
    case WindowType::kSqrtHann: return "sqrt_hann";
    case WindowType::kRect: return "rect";
  }
  return "unknown";
}

WindowType parse_window(std::string_view name) {
  if (name == "hann") return WindowType::kHann;
  if (name == "sqrt_hann") return WindowType::kSqrtHann;
  if (name == "rect") return WindowType::kRect;
  throw Error("unknown window '" + std::string(name) + "'");
}

void StftParams::validate() const {
  if (frame_length == 0 || (frame_length & (frame_length - 1)) != 0) {
    throw Error("frame length must be a power of two");
  }
  if (hop_length == 0 || hop_length > frame_length) {
    throw Error("hop length must be in (0, frame_length]");
  }
  if (frame_length % hop_length != 0) {
    throw Error("hop length must divide frame length");
  }
}

std::vector<double> analysis_window(WindowType type, std::size_t length) {
  std::vector<double> w(length, 1.0);
  if (type == WindowType::kRect) return w;
  for (std::size_t n = 0; n < length; ++n) {
    const double hann =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                             static_cast<double>(length));
    w[n] = type == WindowType::kHann ? hann : std::sqrt(hann);
  }
  return w;
}

std::vector<double> synthesis_window(WindowType type, std::size_t length) {
  if (type == WindowType::kSqrtHann) return analysis_window(type, length);
  return std::vector<double>(length, 1.0);
}

namespace {

// Overlap-add sum of analysis * synthesis at each phase within one hop.
std::vector<double> OverlapSums(const StftParams& params) {
  const auto a = analysis_window(params.window, params.frame_length);
  const auto s = synthesis_window(params.window, params.frame_length);
  std::vector<double> sums(params.hop_length, 0.0);
  for (std::size_t n = 0; n < params.frame_length; ++n) {
    sums[n % params.hop_length] += a[n] * s[n];
  }
  return sums;
}

}  // namespace

bool satisfies_cola(const StftParams& params) {
  params.validate();
  const auto sums = OverlapSums(params);
  const auto [lo, hi] = std::minmax_element(sums.begin(), sums.end());
  return *lo > 0.0 && (*hi - *lo) <= 1e-10 * *hi;
}

TfMap::TfMap(std::size_t bins, std::size_t frames, double fill)
    : bins_(bins), frames_(frames), values_(bins * frames, fill) {}

Spectrogram::Spectrogram(std::size_t frames, const StftParams& params,
                         int sample_rate, std::size_t signal_length,
                         std::size_t leading_padding)
    : bins_(params.bins()),
      frames_(frames),
      params_(params),
      sample_rate_(sample_rate),
      signal_length_(signal_length),
      leading_padding_(leading_padding),
      coefficients_(bins_ * frames) {
  params.validate();
  if (sample_rate <= 0) throw Error("sample rate must be positive");
}

namespace {

Spectrogram Analyze(std::span<const double> x, const StftParams& params,
                    int sample_rate, std::size_t signal_length,
                    std::size_t leading_padding) {
  params.validate();
  const std::size_t n = params.frame_length;
  const std::size_t hop = params.hop_length;
  if (x.size() < n) throw Error("insufficient samples");
  const std::size_t frames = 1 + (x.size() - n + hop - 1) / hop;
  Spectrogram spec(frames, params, sample_rate, signal_length, leading_padding);
  const auto window = analysis_window(params.window, n);
  RealFft fft(n);
  std::vector<double> buf(n);
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t start = f * hop;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t idx = start + i;
      buf[i] = idx < x.size() ? x[idx] * window[i] : 0.0;
    }
    fft.forward(buf, spec.frame(f));
  }
  return spec;
}

std::span<const double> MonoChannel(const AudioBuffer& signal) {
  if (signal.channel_count() != 1) throw Error("stft expects a mono signal");
  return signal.channel(0);
}

}  // namespace

Spectrogram stft(const AudioBuffer& signal, const StftParams& params) {
  auto x = MonoChannel(signal);
  return Analyze(x, params, signal.sample_rate(), x.size(), 0);
}

Spectrogram stft_padded(const AudioBuffer& signal, const StftParams& params) {
  params.validate();
  auto x = MonoChannel(signal);
  const std::size_t pad = params.frame_length - params.hop_length;
  std::vector<double> padded(x.size() + 2 * pad, 0.0);
  std::copy(x.begin(), x.end(), padded.begin() + pad);
  return Analyze(padded, params, signal.sample_rate(), x.size(), pad);
}

AudioBuffer istft(const Spectrogram& spec) {
  const StftParams& params = spec.params();
  if (!satisfies_cola(params)) throw Error("window does not satisfy COLA");
  const std::size_t n = params.frame_length;
  const std::size_t hop = params.hop_length;
  const double norm = OverlapSums(params).front();
  const auto window = synthesis_window(params.window, n);

  const std::size_t total =
      spec.frames() == 0 ? 0 : (spec.frames() - 1) * hop + n;
  std::vector<double> out(std::max(total, spec.leading_padding() + spec.signal_length()), 0.0);
  RealFft fft(n);
  std::vector<double> buf(n);
  for (std::size_t f = 0; f < spec.frames(); ++f) {
    fft.inverse(spec.frame(f), buf);
    const std::size_t start = f * hop;
    for (std::size_t i = 0; i < n; ++i) out[start + i] += buf[i] * window[i];
  }
  const double scale = 1.0 / norm;
  std::vector<double> result(spec.signal_length());
  for (std::size_t i = 0; i < result.size(); ++i) {
    result[i] = out[spec.leading_padding() + i] * scale;
  }
  return AudioBuffer::mono(std::move(result), spec.sample_rate());
}

TfMap power_map(const Spectrogram& spec) {
  TfMap map(spec.bins(), spec.frames());
  simd::power(spec.coefficients(), map.values());
  return map;
}

}  // namespace azoom
