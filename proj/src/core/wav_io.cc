#include "audiozoom/wav_io.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "audiozoom/error.h"

namespace azoom {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t ReadU16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t ReadU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void PutU16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(static_cast<unsigned char>(v & 0xFF));
  out.push_back(static_cast<unsigned char>(v >> 8));
}

void PutU32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) {
    out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
  }
}

void PutTag(std::vector<unsigned char>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

AudioBuffer read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw Error("'" + path + "' is not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::size_t size = ReadU32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = std::min(size, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (available < 16) throw Error("'" + path + "': truncated fmt chunk");
      format = ReadU16(chunk + 8);
      channels = ReadU16(chunk + 10);
      rate = ReadU32(chunk + 12);
      bits = ReadU16(chunk + 22);
      if (format == kFormatExtensible && available >= 26) {
        format = ReadU16(chunk + 8 + 24);  // first two bytes of the subformat GUID
      }
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = chunk + 8;
      data_size = available;
    }
    pos = body + size + (size & 1);
  }
  if (channels == 0 || rate == 0) throw Error("'" + path + "': missing fmt chunk");
  if (!data) throw Error("'" + path + "': missing data chunk");

  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool float32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !float32) {
    throw Error("'" + path + "': only 16-bit PCM and 32-bit float are supported");
  }
  const std::size_t sample_bytes = bits / 8;
  const std::size_t frames = data_size / (sample_bytes * channels);
  std::vector<std::vector<double>> out(channels, std::vector<double>(frames));
  for (std::size_t n = 0; n < frames; ++n) {
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char* p = data + (n * channels + c) * sample_bytes;
      if (pcm16) {
        out[c][n] = static_cast<std::int16_t>(ReadU16(p)) / 32768.0;
      } else {
        const std::uint32_t raw = ReadU32(p);
        float v;
        std::memcpy(&v, &raw, sizeof(v));
        out[c][n] = v;
      }
    }
  }
  return AudioBuffer(std::move(out), static_cast<int>(rate));
}

void write_wav(const std::string& path, const AudioBuffer& audio,
               WavFormat format) {
  const std::size_t channels = audio.channel_count();
  const std::size_t frames = audio.frames();
  const std::uint16_t bits = format == WavFormat::kPcm16 ? 16 : 32;
  const std::size_t data_size = frames * channels * (bits / 8);

  std::vector<unsigned char> out;
  out.reserve(44 + data_size);
  PutTag(out, "RIFF");
  PutU32(out, static_cast<std::uint32_t>(36 + data_size));
  PutTag(out, "WAVE");
  PutTag(out, "fmt ");
  PutU32(out, 16);
  PutU16(out, format == WavFormat::kPcm16 ? kFormatPcm : kFormatFloat);
  PutU16(out, static_cast<std::uint16_t>(channels));
  PutU32(out, static_cast<std::uint32_t>(audio.sample_rate()));
  PutU32(out, static_cast<std::uint32_t>(audio.sample_rate() * channels * (bits / 8)));
  PutU16(out, static_cast<std::uint16_t>(channels * (bits / 8)));
  PutU16(out, bits);
  PutTag(out, "data");
  PutU32(out, static_cast<std::uint32_t>(data_size));
  for (std::size_t n = 0; n < frames; ++n) {
    for (std::size_t c = 0; c < channels; ++c) {
      const double v = audio.channel(c)[n];
      if (format == WavFormat::kPcm16) {
        const double scaled = std::round(std::clamp(v, -1.0, 1.0) * 32767.0);
        PutU16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
      } else {
        const float f = static_cast<float>(v);
        std::uint32_t raw;
        std::memcpy(&raw, &f, sizeof(raw));
        PutU32(out, raw);
      }
    }
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error("cannot write '" + path + "'");
  file.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
  if (!file) throw Error("write failed for '" + path + "'");
}

}  // namespace azoom
