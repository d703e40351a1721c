#ifndef AUDIOZOOM_METRICS_H_
#define AUDIOZOOM_METRICS_H_

// Objective evaluation against ground-truth source images. A linear stage
// with frozen parameters is run separately on the target and residual images;
// a nonlinear post-filter is attributed by reapplying the gains it computed
// on the mixture to each component.

#include <cstddef>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>

#include "audiozoom/audio_buffer.h"
#include "audiozoom/gjbf.h"
#include "audiozoom/mpdr.h"
#include "audiozoom/stft.h"

namespace azoom {

// A processing stage whose parameters no longer depend on its input.
class LinearStage {
 public:
  virtual ~LinearStage() = default;
  virtual AudioBuffer apply(const AudioBuffer& input) const = 0;
};

class IdentityStage : public LinearStage {
 public:
  AudioBuffer apply(const AudioBuffer& input) const override { return input; }
};

// Two-channel input -> mono istft(W^H Y).
class MpdrStage : public LinearStage {
 public:
  MpdrStage(MpdrWeights weights, StftParams params);
  AudioBuffer apply(const AudioBuffer& input) const override;

 private:
  MpdrWeights weights_;
  StftParams params_;
};

// Two-channel input -> mono replay of a recorded GJBF run.
class GjbfStage : public LinearStage {
 public:
  explicit GjbfStage(GjbfTrajectory trajectory);
  AudioBuffer apply(const AudioBuffer& input) const override;

 private:
  GjbfTrajectory trajectory_;
};

// Throws "stage not freezable" when the run kept no trajectory.
std::unique_ptr<LinearStage> freeze(const GjbfOutput& run);

struct Components {
  AudioBuffer target;
  AudioBuffer residual;
};

Components decompose_linear(const LinearStage& stage,
                            const AudioBuffer& target_images,
                            const AudioBuffer& residual_images);

// max |a + b - mixture| / max |mixture|
double superposition_error(const Components& parts, const AudioBuffer& mixture);

// Same gains applied to both component spectrograms.
std::pair<Spectrogram, Spectrogram> shadow_gain_decompose(
    const TfMap& gains, const Spectrogram& target, const Spectrogram& residual);

// Time-domain version: analyze, apply gains, synthesize.
Components shadow_gain_decompose(const TfMap& gains, const Components& parts,
                                 const StftParams& params);

inline constexpr double kDbCap = 200.0;

// 10 log10(|target|^2 / |residual|^2), clamped to +-200 dB.
double osinr_db(const AudioBuffer& target, const AudioBuffer& residual);
double osinr_db(const Spectrogram& target, const Spectrogram& residual);

// 10 log10(sum (g e(n + k) - s(n))^2 / sum s(n)^2) for the delay k within
// +-max_lag that maximizes |cross-correlation| and the least-squares gain g,
// summed where the aligned signals overlap. Clamped below at -200 dB.
// Throws for a zero reference or when the lengths differ by more than
// max_lag.
double mse_db(const AudioBuffer& estimate, const AudioBuffer& reference,
              std::size_t max_lag = 512);

struct Alignment {
  std::ptrdiff_t lag = 0;  // estimate(n + lag) lines up with reference(n)
  double gain = 0.0;       // least-squares scale from estimate to reference
};

// The alignment mse_db uses.
Alignment align_to_reference(const AudioBuffer& estimate,
                             const AudioBuffer& reference,
                             std::size_t max_lag = 512);

// Splits a mono estimate into the part explained by the aligned, scaled
// reference and the remainder. Both outputs have the estimate's length.
Components project_onto_reference(const AudioBuffer& estimate,
                                  const AudioBuffer& reference,
                                  std::size_t max_lag = 512);

struct StageMetrics {
  double osinr_db = 0.0;
  double mse_db = 0.0;
};

struct EvalReport {
  double osinr_db = 0.0;
  double input_sinr_db = 0.0;
  double sinr_gain_db = 0.0;
  double mse_db = 0.0;
  StageMetrics beamformer;
  // Unset when the post-filter is disabled.
  std::optional<StageMetrics> postfilter;

  static EvalReport make(double input_sinr_db, const StageMetrics& beamformer,
                         const std::optional<StageMetrics>& postfilter);
};

std::string report_csv_header();
std::string report_csv_row(const EvalReport& report);
void print_report(std::ostream& out, const EvalReport& report);

}  // namespace azoom

#endif  // AUDIOZOOM_METRICS_H_
