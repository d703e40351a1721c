#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "audiozoom/error.h"
#include "audiozoom/simulate.h"

namespace azoom {
namespace {

struct Vowel {
  std::array<double, 3> formants;    // Hz
  std::array<double, 3> bandwidths;  // Hz
};

// Rough adult formant targets for a handful of vowels.
constexpr std::array<Vowel, 6> kVowels = {{
    {{730, 1090, 2440}, {90, 110, 170}},  // a
    {{530, 1840, 2480}, {70, 100, 160}},  // e
    {{270, 2290, 3010}, {50, 100, 170}},  // i
    {{570, 840, 2410}, {70, 80, 160}},    // o
    {{300, 870, 2240}, {60, 80, 140}},    // u
    {{640, 1190, 2390}, {80, 100, 150}},  // schwa
}};
constexpr std::array<double, 3> kFormantGains = {1.0, 0.5, 0.25};

double FormantEnvelope(double f, const std::array<double, 3>& formants,
                       const std::array<double, 3>& bandwidths) {
  double e = 0.02;
  for (std::size_t i = 0; i < 3; ++i) {
    const double x = (f - formants[i]) / (0.5 * bandwidths[i]);
    e += kFormantGains[i] / (1.0 + x * x);
  }
  return e;
}

// Raised-cosine onset and offset over `ramp` samples.
double Envelope(std::size_t i, std::size_t length, std::size_t ramp) {
  const std::size_t edge = std::min(i, length - 1 - i);
  if (edge >= ramp) return 1.0;
  return 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(edge) /
                              static_cast<double>(ramp));
}

void AddVoiced(std::vector<double>& out, std::size_t start, std::size_t length,
               double f0_start, double f0_end, const Vowel& from,
               const Vowel& to, int rate, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> phase0(0.0, 2.0 * std::numbers::pi);
  const double nyquist_limit = 0.45 * rate;
  const std::size_t max_harmonics =
      static_cast<std::size_t>(nyquist_limit / std::min(f0_start, f0_end)) + 1;
  std::vector<double> phase(max_harmonics);
  for (double& p : phase) p = phase0(rng);
  const std::size_t ramp = std::min<std::size_t>(length / 4, rate / 50);
  const double vibrato_rate = 5.0;

  for (std::size_t i = 0; i < length && start + i < out.size(); ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(length);
    const double t = static_cast<double>(i) / rate;
    const double f0 = (f0_start + (f0_end - f0_start) * u) *
                      (1.0 + 0.01 * std::sin(2.0 * std::numbers::pi * vibrato_rate * t));
    std::array<double, 3> formants, bandwidths;
    for (std::size_t k = 0; k < 3; ++k) {
      formants[k] = from.formants[k] + (to.formants[k] - from.formants[k]) * u;
      bandwidths[k] = from.bandwidths[k] + (to.bandwidths[k] - from.bandwidths[k]) * u;
    }
    double sample = 0.0;
    for (std::size_t h = 0; h < max_harmonics; ++h) {
      const double fh = f0 * static_cast<double>(h + 1);
      phase[h] += 2.0 * std::numbers::pi * fh / rate;
      if (fh >= nyquist_limit) continue;
      const double tilt = 1.0 / std::pow(static_cast<double>(h + 1), 0.6);
      sample += tilt * FormantEnvelope(fh, formants, bandwidths) * std::sin(phase[h]);
    }
    out[start + i] += Envelope(i, length, ramp) * sample;
  }
}

void AddFricative(std::vector<double>& out, std::size_t start,
                  std::size_t length, double level, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t ramp = std::max<std::size_t>(1, length / 4);
  double previous = 0.0;
  for (std::size_t i = 0; i < length && start + i < out.size(); ++i) {
    const double w = gauss(rng);
    // First difference tilts the noise towards high frequencies.
    out[start + i] += level * Envelope(i, length, ramp) * (w - previous);
    previous = w;
  }
}

}  // namespace

AudioBuffer synthesize_speech_like(std::uint64_t seed,
                                   const SpeechLikeOptions& options) {
  if (!(options.duration_s > 0.0)) throw Error("duration must be positive");
  if (options.sample_rate <= 0) throw Error("sample rate must be positive");
  const int rate = options.sample_rate;
  const std::size_t total =
      static_cast<std::size_t>(std::llround(options.duration_s * rate));
  std::vector<double> out(total, 0.0);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  auto range = [&](double lo, double hi) { return lo + (hi - lo) * uni(rng); };
  auto samples = [&](double seconds) {
    return static_cast<std::size_t>(seconds * rate);
  };

  const double base_f0 = range(95.0, 220.0);
  std::size_t pos = samples(range(0.02, 0.12));
  while (pos < total) {
    if (uni(rng) < 0.75) {
      const std::size_t len = samples(range(0.12, 0.30));
      const double f0a = base_f0 * range(0.85, 1.15);
      const double f0b = f0a * range(0.8, 1.2);
      const Vowel& from = kVowels[static_cast<std::size_t>(uni(rng) * kVowels.size()) % kVowels.size()];
      const Vowel& to = kVowels[static_cast<std::size_t>(uni(rng) * kVowels.size()) % kVowels.size()];
      AddVoiced(out, pos, len, f0a, f0b, from, to, rate, rng);
      pos += len;
    } else {
      const std::size_t len = samples(range(0.05, 0.15));
      AddFricative(out, pos, len, range(0.3, 1.0), rng);
      pos += len;
    }
    pos += uni(rng) < 0.6 ? samples(range(0.03, 0.2)) : samples(range(0.005, 0.03));
  }

  double sum = 0.0;
  for (double v : out) sum += v * v;
  if (sum > 0.0) {
    const double gain = options.rms / std::sqrt(sum / static_cast<double>(total));
    for (double& v : out) v *= gain;
  }
  return AudioBuffer::mono(std::move(out), rate);
}

}  // namespace azoom
