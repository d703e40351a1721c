#ifndef AUDIOZOOM_AUDIO_BUFFER_H_
#define AUDIOZOOM_AUDIO_BUFFER_H_

#include <cstddef>
#include <span>
#include <vector>

namespace azoom {

// Multi-channel sampled waveform. All channels have the same length.
class AudioBuffer {
 public:
  AudioBuffer() = default;
  AudioBuffer(std::size_t channels, std::size_t frames, int sample_rate);
  AudioBuffer(std::vector<std::vector<double>> channels, int sample_rate);

  static AudioBuffer mono(std::vector<double> samples, int sample_rate);

  std::size_t channel_count() const { return channels_.size(); }
  std::size_t frames() const {
    return channels_.empty() ? 0 : channels_.front().size();
  }
  int sample_rate() const { return sample_rate_; }
  double duration_s() const {
    return static_cast<double>(frames()) / sample_rate_;
  }

  std::span<double> channel(std::size_t index);
  std::span<const double> channel(std::size_t index) const;

  // Copy of one channel as a mono buffer.
  AudioBuffer extract(std::size_t index) const;

  // Drops trailing samples so that frames() == length.
  void truncate(std::size_t length);

 private:
  std::vector<std::vector<double>> channels_;
  int sample_rate_ = 0;
};

// Sum of squares over all channels.
double energy(const AudioBuffer& buffer);

// Mean per-sample power, averaged over channels.
double mean_power(const AudioBuffer& buffer);

// Element-wise a + b. Shapes and rates must match.
AudioBuffer add(const AudioBuffer& a, const AudioBuffer& b);

AudioBuffer scaled(const AudioBuffer& buffer, double gain);

// Stacks two mono buffers into a two-channel buffer.
AudioBuffer stack(const AudioBuffer& first, const AudioBuffer& second);

}  // namespace azoom

#endif  // AUDIOZOOM_AUDIO_BUFFER_H_
