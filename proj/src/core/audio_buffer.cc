#include "audiozoom/audio_buffer.h"

#include <string>
#include <utility>

#include "audiozoom/error.h"

namespace azoom {

AudioBuffer::AudioBuffer(std::size_t channels, std::size_t frames,
                         int sample_rate)
    : channels_(channels, std::vector<double>(frames, 0.0)),
      sample_rate_(sample_rate) {
  if (channels == 0) throw Error("audio buffer needs at least one channel");
  if (sample_rate <= 0) throw Error("sample rate must be positive");
}

AudioBuffer::AudioBuffer(std::vector<std::vector<double>> channels,
                         int sample_rate)
    : channels_(std::move(channels)), sample_rate_(sample_rate) {
  if (channels_.empty()) throw Error("audio buffer needs at least one channel");
  if (sample_rate <= 0) throw Error("sample rate must be positive");
  for (const auto& c : channels_) {
    if (c.size() != channels_.front().size()) {
      throw Error("all channels must have equal length");
    }
  }
}

AudioBuffer AudioBuffer::mono(std::vector<double> samples, int sample_rate) {
  std::vector<std::vector<double>> channels;
  channels.push_back(std::move(samples));
  return AudioBuffer(std::move(channels), sample_rate);
}

std::span<double> AudioBuffer::channel(std::size_t index) {
  if (index >= channels_.size()) {
    throw Error("channel index " + std::to_string(index) + " out of range");
  }
  return channels_[index];
}

std::span<const double> AudioBuffer::channel(std::size_t index) const {
  if (index >= channels_.size()) {
    throw Error("channel index " + std::to_string(index) + " out of range");
  }
  return channels_[index];
}

AudioBuffer AudioBuffer::extract(std::size_t index) const {
  auto c = channel(index);
  return mono(std::vector<double>(c.begin(), c.end()), sample_rate_);
}

void AudioBuffer::truncate(std::size_t length) {
  for (auto& c : channels_) {
    if (length < c.size()) c.resize(length);
  }
}

double energy(const AudioBuffer& buffer) {
  double total = 0.0;
  for (std::size_t c = 0; c < buffer.channel_count(); ++c) {
    for (double v : buffer.channel(c)) total += v * v;
  }
  return total;
}

double mean_power(const AudioBuffer& buffer) {
  if (buffer.frames() == 0) return 0.0;
  return energy(buffer) /
         static_cast<double>(buffer.frames() * buffer.channel_count());
}

AudioBuffer add(const AudioBuffer& a, const AudioBuffer& b) {
  if (a.channel_count() != b.channel_count() || a.frames() != b.frames()) {
    throw Error("buffer shapes differ");
  }
  if (a.sample_rate() != b.sample_rate()) throw Error("sample rates differ");
  AudioBuffer out = a;
  for (std::size_t c = 0; c < a.channel_count(); ++c) {
    auto dst = out.channel(c);
    auto src = b.channel(c);
    for (std::size_t n = 0; n < dst.size(); ++n) dst[n] += src[n];
  }
  return out;
}

AudioBuffer scaled(const AudioBuffer& buffer, double gain) {
  AudioBuffer out = buffer;
  for (std::size_t c = 0; c < out.channel_count(); ++c) {
    for (double& v : out.channel(c)) v *= gain;
  }
  return out;
}

AudioBuffer stack(const AudioBuffer& first, const AudioBuffer& second) {
  if (first.channel_count() != 1 || second.channel_count() != 1) {
    throw Error("stack expects two mono buffers");
  }
  if (first.frames() != second.frames()) throw Error("length mismatch");
  if (first.sample_rate() != second.sample_rate()) {
    throw Error("sample rates differ");
  }
  auto a = first.channel(0);
  auto b = second.channel(0);
  return AudioBuffer({std::vector<double>(a.begin(), a.end()),
                      std::vector<double>(b.begin(), b.end())},
                     first.sample_rate());
}

}  // namespace azoom
