#ifndef AUDIOZOOM_GJBF_H_
#define AUDIOZOOM_GJBF_H_

// Griffiths-Jim beamformer specialised to a broadside target on two
// microphones:
//
//   y_f(n) = (y1(n) + y2(n)) / 2        fixed path,   w_c = [1/2, 1/2]
//   x(n)   =  y1(n) - y2(n)             blocking path, B = [1, -1]
//   z(n)   =  y_f(n - D) - (w_a * x)(n) output
//
// w_a is an L-tap filter adapted block by block with an overlap-save
// frequency-domain LMS that minimizes the power of z. D keeps the filter
// causal; z is advanced by D again so it shares the input timebase.

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "audiozoom/audio_buffer.h"
#include "audiozoom/stft.h"

namespace azoom {

struct GjbfConfig {
  std::size_t filter_length = 250;
  double step_size = 0.05;
  // Samples per adaptation block; filter_length when unset. The transform
  // size is filter_length + block.
  std::optional<std::size_t> block_size;
  double leak = 0.0;
  // filter_length / 2 when unset.
  std::optional<std::size_t> alignment_delay;
  // Per-bin step mu / (P_k + delta) with P_k an exponentially smoothed
  // power of the blocking-path spectrum. Fixed step mu when false.
  bool normalized = true;
  double power_smoothing = 0.9;
  // delta = regularization * max(Px, fixed_power_floor * Pf), with Px the
  // mean over bins and past blocks of |X_k|^2 and Pf the same for the fixed
  // path.
  double regularization = 1.0;
  double fixed_power_floor = 1e-2;
  // Project the gradient onto L causal taps each block (constrained FDAF).
  bool constrained = true;
  // Keep the per-block weights so the run can be replayed as a fixed
  // time-varying linear filter.
  bool record_trajectory = false;

  void validate() const;
  std::size_t block() const { return block_size.value_or(filter_length); }
  std::size_t delay() const { return alignment_delay.value_or(filter_length / 2); }
  std::size_t fft_size() const { return filter_length + block(); }
};

struct AdaptiveFilterState {
  std::vector<double> taps;                           // w_a, L values
  std::vector<std::complex<double>> frequency_state;  // FFT of [w_a, 0]
  std::vector<double> input_history;                  // last L blocking samples
  std::vector<double> bin_power;                      // normalization state
  std::size_t blocks_processed = 0;
};

// Frequency-domain weights used for every block of a run.
struct GjbfTrajectory {
  std::size_t filter_length = 0;
  std::size_t block = 0;
  std::size_t delay = 0;
  std::size_t input_length = 0;
  std::vector<std::vector<std::complex<double>>> weights;
};

struct GjbfOutput {
  AudioBuffer z;    // beamformer output
  AudioBuffer y_b;  // adaptive-path estimate, z = y_f - y_b
  AudioBuffer y_f;  // fixed path
  AdaptiveFilterState final_state;
  std::optional<GjbfTrajectory> trajectory;
};

// Mono inputs of equal length and rate.
AudioBuffer fixed_path(const AudioBuffer& ch1, const AudioBuffer& ch2);
AudioBuffer blocking_path(const AudioBuffer& ch1, const AudioBuffer& ch2);

// Throws "step size too large" if any tap magnitude exceeds 1e6 or becomes
// non-finite. Inputs must be longer than twice the filter length.
GjbfOutput fdaf_gjbf(const AudioBuffer& ch1, const AudioBuffer& ch2,
                     const GjbfConfig& config);

// Runs the recorded weights over new inputs without adapting. The map
// (ch1, ch2) -> z is linear, and replaying the adapted inputs reproduces the
// adaptive output.
AudioBuffer replay_gjbf(const GjbfTrajectory& trajectory, const AudioBuffer& ch1,
                        const AudioBuffer& ch2);

// Large-SINR value for coefficients whose variance is below the floor.
inline constexpr double kSinrSentinel = 1e6;

// (|Z|^2 - sigma^2) / sigma^2 floored at 0. Coefficients with sigma^2 below
// 1e-12 * mean |Z|^2 get kSinrSentinel.
TfMap sinr_map(const Spectrogram& z, const TfMap& sigma2);

// Mean over coefficients with sigma^2 at or above the floor of
// 10 log10(1 + SINR). +inf when every coefficient is floored.
double mean_sinr_db(const Spectrogram& z, const TfMap& sigma2);

struct FilterLengthPoint {
  std::size_t length = 0;
  double mean_sinr_db = 0.0;
};

struct FilterLengthSelection {
  std::size_t best_length = 0;
  std::vector<FilterLengthPoint> curve;  // ascending length
  std::vector<std::string> warnings;     // candidates that failed
};

// Runs fdaf_gjbf for each candidate length (concurrently), scores each output
// with mean_sinr_db against the residual variance of the microphone spectra,
// and returns the best length. Block size and alignment delay follow each
// candidate length unless the template fixes them. Ties go to the smaller
// length. Failed candidates are skipped with a warning; if all fail the first
// error is rethrown.
FilterLengthSelection select_filter_length(const AudioBuffer& ch1,
                                           const AudioBuffer& ch2,
                                           const std::vector<std::size_t>& candidates,
                                           const GjbfConfig& config_template,
                                           const StftParams& stft_params = {});

}  // namespace azoom

#endif  // AUDIOZOOM_GJBF_H_
