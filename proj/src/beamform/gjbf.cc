#include "audiozoom/gjbf.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "audiozoom/error.h"
#include "audiozoom/fft.h"
#include "audiozoom/simd/kernels.h"

namespace azoom {

void GjbfConfig::validate() const {
  if (filter_length < 1) throw Error("filter length must be at least 1");
  if (!(step_size > 0.0 && step_size < 2.0)) {
    throw Error("step size must be in (0, 2)");
  }
  if (block() < 1) throw Error("block size must be at least 1");
  if (!(leak >= 0.0 && leak <= 1.0)) throw Error("leak must be in [0, 1]");
  if (!(power_smoothing >= 0.0 && power_smoothing < 1.0)) {
    throw Error("power smoothing must be in [0, 1)");
  }
  if (!(regularization >= 0.0)) throw Error("regularization must be nonnegative");
  if (!(fixed_power_floor >= 0.0)) {
    throw Error("fixed power floor must be nonnegative");
  }
}

namespace {

void CheckPair(const AudioBuffer& ch1, const AudioBuffer& ch2) {
  if (ch1.channel_count() != 1 || ch2.channel_count() != 1) {
    throw Error("expected mono channel buffers");
  }
  if (ch1.frames() != ch2.frames()) throw Error("channel length mismatch");
  if (ch1.sample_rate() != ch2.sample_rate()) {
    throw Error("channel sample rates differ");
  }
}

constexpr double kDivergenceLimit = 1e6;

// Overlap-save filtering of the blocking path: a sliding buffer of the last
// N = L + B input samples and its transform.
class OverlapSaveFilter {
 public:
  OverlapSaveFilter(std::size_t filter_length, std::size_t block)
      : length_(filter_length),
        block_(block),
        fft_(filter_length + block),
        window_(fft_.size(), 0.0),
        spectrum_(fft_.bins()),
        product_(fft_.bins()),
        scratch_(fft_.size()) {}

  std::size_t bins() const { return fft_.bins(); }
  RealFft& fft() { return fft_; }
  std::span<const std::complex<double>> spectrum() const { return spectrum_; }
  std::span<const double> window() const { return window_; }

  void push(std::span<const double> block) {
    std::shift_left(window_.begin(), window_.end(),
                    static_cast<std::ptrdiff_t>(block_));
    std::copy(block.begin(), block.end(), window_.end() - static_cast<std::ptrdiff_t>(block_));
    fft_.forward(window_, spectrum_);
  }

  // Last B samples of IFFT(X .* W): the linear convolution for this block.
  void filter(std::span<const std::complex<double>> weights,
              std::span<double> out) {
    simd::complex_multiply(spectrum_, weights, product_);
    fft_.inverse(product_, scratch_);
    std::copy(scratch_.begin() + static_cast<std::ptrdiff_t>(length_),
              scratch_.end(), out.begin());
  }

 private:
  std::size_t length_;
  std::size_t block_;
  RealFft fft_;
  std::vector<double> window_;
  std::vector<std::complex<double>> spectrum_;
  std::vector<std::complex<double>> product_;
  std::vector<double> scratch_;
};

// Streams aligned for block processing: x is the blocking path padded with
// zeros, d is the fixed path delayed by D. Both span whole blocks.
struct AlignedStreams {
  std::vector<double> x;
  std::vector<double> d;
  std::vector<double> y_f;
  std::size_t blocks = 0;
};

AlignedStreams Align(const AudioBuffer& ch1, const AudioBuffer& ch2,
                     std::size_t block, std::size_t delay) {
  const std::size_t len = ch1.frames();
  AlignedStreams s;
  s.blocks = (len + delay + block - 1) / block;
  const std::size_t total = s.blocks * block;
  s.x.assign(total, 0.0);
  s.d.assign(total, 0.0);
  s.y_f.assign(len, 0.0);
  simd::half_sum(ch1.channel(0), ch2.channel(0), s.y_f);
  simd::difference(ch1.channel(0), ch2.channel(0),
                   std::span<double>(s.x.data(), len));
  std::copy(s.y_f.begin(), s.y_f.end(), s.d.begin() + static_cast<std::ptrdiff_t>(delay));
  return s;
}

bool TapsDiverged(std::span<const double> taps) {
  for (double t : taps) {
    if (!std::isfinite(t) || std::abs(t) > kDivergenceLimit) return true;
  }
  return false;
}

}  // namespace

AudioBuffer fixed_path(const AudioBuffer& ch1, const AudioBuffer& ch2) {
  CheckPair(ch1, ch2);
  AudioBuffer out(1, ch1.frames(), ch1.sample_rate());
  simd::half_sum(ch1.channel(0), ch2.channel(0), out.channel(0));
  return out;
}

AudioBuffer blocking_path(const AudioBuffer& ch1, const AudioBuffer& ch2) {
  CheckPair(ch1, ch2);
  AudioBuffer out(1, ch1.frames(), ch1.sample_rate());
  simd::difference(ch1.channel(0), ch2.channel(0), out.channel(0));
  return out;
}

GjbfOutput fdaf_gjbf(const AudioBuffer& ch1, const AudioBuffer& ch2,
                     const GjbfConfig& config) {
  config.validate();
  CheckPair(ch1, ch2);
  const std::size_t len = ch1.frames();
  const std::size_t taps_len = config.filter_length;
  if (len <= 2 * taps_len) {
    throw Error("signal must be longer than twice the filter length");
  }
  const std::size_t block = config.block();
  const std::size_t delay = config.delay();
  AlignedStreams s = Align(ch1, ch2, block, delay);

  OverlapSaveFilter os(taps_len, block);
  const std::size_t n_fft = os.fft().size();
  const std::size_t bins = os.bins();
  std::vector<std::complex<double>> weights(bins);
  std::vector<std::complex<double>> error_spectrum(bins), gradient(bins);
  std::vector<double> taps(taps_len, 0.0);
  std::vector<double> power(bins, 0.0), step(bins, config.step_size);
  double long_run_power = 0.0, long_run_fixed = 0.0;
  std::vector<double> y(block), e_padded(n_fft, 0.0), g(n_fft);
  std::vector<double> z_stream(s.x.size()), y_stream(s.x.size());

  std::optional<GjbfTrajectory> trajectory;
  if (config.record_trajectory) {
    trajectory.emplace();
    trajectory->filter_length = taps_len;
    trajectory->block = block;
    trajectory->delay = delay;
    trajectory->input_length = len;
    trajectory->weights.reserve(s.blocks);
  }

  for (std::size_t j = 0; j < s.blocks; ++j) {
    const std::size_t start = j * block;
    os.push(std::span<const double>(s.x.data() + start, block));
    if (trajectory) trajectory->weights.push_back(weights);
    os.filter(weights, y);
    for (std::size_t i = 0; i < block; ++i) {
      const double e = s.d[start + i] - y[i];
      z_stream[start + i] = e;
      y_stream[start + i] = y[i];
      e_padded[taps_len + i] = e;
    }

    if (config.normalized) {
      if (j == 0) {
        simd::power(os.spectrum(), power);
      } else {
        simd::smooth_power(os.spectrum(), config.power_smoothing, power);
      }
      // delta follows the long-run blocking power, not the current one, so
      // pauses in the interference do not inflate the step.
      double mean = 0.0;
      for (const auto& x : os.spectrum()) mean += std::norm(x);
      mean /= static_cast<double>(bins);
      long_run_power += (mean - long_run_power) / static_cast<double>(j + 1);
      // Fixed-path block power in the same units as mean |X_k|^2.
      double fixed = 0.0;
      for (std::size_t i = 0; i < block; ++i) fixed += s.d[start + i] * s.d[start + i];
      fixed *= static_cast<double>(n_fft) / static_cast<double>(block);
      long_run_fixed += (fixed - long_run_fixed) / static_cast<double>(j + 1);
      // The fixed-path floor stops the taps chasing a blocking signal that is
      // negligible next to the fixed path, e.g. right after a silent lead-in.
      const double reference =
          std::max(long_run_power, config.fixed_power_floor * long_run_fixed);
      const double delta = config.regularization * reference +
                           std::numeric_limits<double>::min();
      for (std::size_t k = 0; k < bins; ++k) {
        step[k] = config.step_size / (power[k] + delta);
      }
    }

    // Gradient: correlation of the block error with the buffered input.
    os.fft().forward(e_padded, error_spectrum);
    simd::conj_multiply_scaled(os.spectrum(), error_spectrum, step, gradient);
    const double keep = 1.0 - config.leak;
    if (config.constrained) {
      os.fft().inverse(gradient, g);
      for (std::size_t i = 0; i < taps_len; ++i) taps[i] = keep * taps[i] + g[i];
      if (TapsDiverged(taps)) throw Error("step size too large");
      std::fill(g.begin(), g.end(), 0.0);
      std::copy(taps.begin(), taps.end(), g.begin());
      os.fft().forward(g, weights);
    } else {
      for (std::size_t k = 0; k < bins; ++k) {
        weights[k] = keep * weights[k] + gradient[k];
      }
      os.fft().inverse(weights, g);
      if (TapsDiverged(g)) throw Error("step size too large");
      std::copy(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(taps_len), taps.begin());
    }
  }

  GjbfOutput out;
  out.z = AudioBuffer(1, len, ch1.sample_rate());
  out.y_b = AudioBuffer(1, len, ch1.sample_rate());
  auto z = out.z.channel(0);
  auto yb = out.y_b.channel(0);
  for (std::size_t n = 0; n < len; ++n) {
    z[n] = z_stream[n + delay];
    yb[n] = y_stream[n + delay];
  }
  out.y_f = AudioBuffer::mono(std::move(s.y_f), ch1.sample_rate());
  out.final_state.taps = taps;
  out.final_state.frequency_state = weights;
  const auto window = os.window();
  out.final_state.input_history.assign(window.end() - static_cast<std::ptrdiff_t>(taps_len), window.end());
  out.final_state.bin_power = power;
  out.final_state.blocks_processed = s.blocks;
  out.trajectory = std::move(trajectory);
  return out;
}

AudioBuffer replay_gjbf(const GjbfTrajectory& trajectory, const AudioBuffer& ch1,
                        const AudioBuffer& ch2) {
  CheckPair(ch1, ch2);
  if (ch1.frames() != trajectory.input_length) {
    throw Error("replay input length differs from the adapted run");
  }
  const std::size_t len = ch1.frames();
  AlignedStreams s = Align(ch1, ch2, trajectory.block, trajectory.delay);
  if (s.blocks != trajectory.weights.size()) {
    throw Error("trajectory block count does not match input");
  }
  OverlapSaveFilter os(trajectory.filter_length, trajectory.block);
  std::vector<double> y(trajectory.block), z_stream(s.x.size());
  for (std::size_t j = 0; j < s.blocks; ++j) {
    const std::size_t start = j * trajectory.block;
    os.push(std::span<const double>(s.x.data() + start, trajectory.block));
    os.filter(trajectory.weights[j], y);
    for (std::size_t i = 0; i < trajectory.block; ++i) {
      z_stream[start + i] = s.d[start + i] - y[i];
    }
  }
  AudioBuffer out(1, len, ch1.sample_rate());
  auto z = out.channel(0);
  for (std::size_t n = 0; n < len; ++n) z[n] = z_stream[n + trajectory.delay];
  return out;
}

}  // namespace azoom
