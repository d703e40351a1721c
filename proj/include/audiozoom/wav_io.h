#ifndef AUDIOZOOM_WAV_IO_H_
#define AUDIOZOOM_WAV_IO_H_

#include <string>

#include "audiozoom/audio_buffer.h"

namespace azoom {

enum class WavFormat { kPcm16, kFloat32 };

// Reads RIFF/WAVE files holding 16-bit PCM or 32-bit IEEE float samples
// (plain or WAVE_FORMAT_EXTENSIBLE). PCM is scaled to [-1, 1).
// Channel 0 is microphone 1 (top), channel 1 microphone 2 (bottom).
AudioBuffer read_wav(const std::string& path);

// PCM16 output is clipped to [-1, 1] and rounded to nearest.
void write_wav(const std::string& path, const AudioBuffer& audio,
               WavFormat format = WavFormat::kFloat32);

}  // namespace azoom

#endif  // AUDIOZOOM_WAV_IO_H_
