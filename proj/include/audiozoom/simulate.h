#ifndef AUDIOZOOM_SIMULATE_H_
#define AUDIOZOOM_SIMULATE_H_

// Far-field two-microphone scene synthesis: each source reaches every
// microphone as a delayed copy of itself, interferers are scaled jointly to a
// requested signal-to-interference ratio, optional echo taps are added to
// every source image and optional white sensor noise to every channel.

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "audiozoom/audio_buffer.h"

namespace azoom {

struct ArrayGeometry {
  std::vector<std::array<double, 3>> mic_positions;  // meters
  std::size_t reference_index = 0;
  double sound_speed = 343.0;  // m/s

  // Two microphones on the x axis, mic 1 at the origin (reference).
  static ArrayGeometry two_mic(double spacing_m = 0.10);

  void validate() const;
  std::size_t mic_count() const { return mic_positions.size(); }

  // Far-field arrival delay (seconds) at each microphone relative to the
  // reference, for a source at the given azimuth in the array plane.
  // Azimuth is measured from the +x axis: 90 degrees is broadside.
  std::vector<double> delays(double azimuth_deg) const;
};

// exp(-j 2 pi f tau_m) per microphone.
std::vector<std::complex<double>> steering_vector(const ArrayGeometry& geometry,
                                                  double azimuth_deg,
                                                  double frequency_hz);

struct FractionalDelayOptions {
  // Interpolator support: taps within (taps + 1) / 2 samples of the
  // fractional position contribute.
  int taps = 31;
  // Kaiser window shape.
  double kaiser_beta = 5.0;
};

// Delays (positive) or advances (negative) every channel by a possibly
// non-integer number of seconds with a Kaiser-windowed sinc interpolator.
// Samples shifted in from outside the buffer are zero. Throws when
// |delay| >= signal duration.
AudioBuffer fractional_delay(const AudioBuffer& signal, double delay_s,
                             const FractionalDelayOptions& options = {});

enum class SourceRole { kTarget, kInterference };

struct SourceSpec {
  double azimuth_deg = 90.0;
  AudioBuffer signal;  // mono
  SourceRole role = SourceRole::kTarget;
};

struct EchoTap {
  double delay_s = 0.0;
  double gain = 0.0;
};

// Exponentially decaying taps with random signs and delays spread over
// [2 ms, t60), reaching -60 dB at t60. Stand-in for a room response.
std::vector<EchoTap> exponential_echo_taps(double t60_s, std::uint64_t seed,
                                           std::size_t count = 24);

struct MixtureSpec {
  SourceSpec target;
  std::vector<SourceSpec> interferers;
  double sir_db = 0.0;
  std::optional<double> sensor_noise_snr_db;
  std::vector<EchoTap> echo_taps;
};

struct SimulatedScene {
  AudioBuffer mixture;              // target + residual, per channel
  AudioBuffer target_image;         // target as received at each mic
  std::vector<AudioBuffer> interferer_images;  // after SIR scaling
  AudioBuffer interference_image;   // sum of interferer_images
  AudioBuffer noise_image;          // sensor noise only
  AudioBuffer residual_image;       // interference_image + noise_image
  double realized_sir_db = 0.0;     // +inf without interferers
};

// SIR is measured on full-file power of the per-channel images, averaged
// across channels. Sources are cropped to the shortest signal.
SimulatedScene synthesize_mixture(const MixtureSpec& spec,
                                  const ArrayGeometry& geometry,
                                  std::uint64_t seed);

// Power ratio in dB of the first to the second buffer (channel-averaged).
double power_ratio_db(const AudioBuffer& numerator,
                      const AudioBuffer& denominator);

struct SpeechLikeOptions {
  double duration_s = 3.0;
  int sample_rate = 16000;
  double rms = 0.1;
};

// Deterministic speech-like test signal: voiced syllables built from
// formant-weighted harmonic series with drifting pitch, interleaved with
// fricative noise bursts and pauses.
AudioBuffer synthesize_speech_like(std::uint64_t seed,
                                   const SpeechLikeOptions& options = {});

}  // namespace azoom

#endif  // AUDIOZOOM_SIMULATE_H_
