#ifndef AUDIOZOOM_PIPELINE_H_
#define AUDIOZOOM_PIPELINE_H_

// Two-stage zoom: a beamformer steered to broadside followed by the
// block-thresholding post-filter, plus the scenario files used to simulate
// test scenes.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "audiozoom/audio_buffer.h"
#include "audiozoom/block_threshold.h"
#include "audiozoom/gjbf.h"
#include "audiozoom/metrics.h"
#include "audiozoom/mpdr.h"
#include "audiozoom/simulate.h"
#include "audiozoom/stft.h"

namespace azoom {

enum class BeamformerKind { kMpdr, kGjbf };

std::string_view beamformer_name(BeamformerKind kind);
// "mpdr" or "gjbf"
BeamformerKind parse_beamformer(std::string_view name);

inline const std::vector<std::size_t> kDefaultSweepLengths = {50,  100, 150, 200,
                                                              245, 250, 300};

struct PipelineConfig {
  BeamformerKind beamformer = BeamformerKind::kMpdr;
  StftParams stft;
  MpdrOptions mpdr;
  GjbfConfig gjbf;
  // Choose the GJBF length with select_filter_length over gjbf_sweep.
  bool gjbf_auto = false;
  std::vector<std::size_t> gjbf_sweep = kDefaultSweepLengths;
  BlockThresholdParams bt;
  bool bt_enabled = true;
  bool normalize_output = true;
  std::uint64_t seed = 0;

  void validate() const;
  // Effective settings as key/value pairs, in a stable order.
  std::vector<std::pair<std::string, std::string>> describe() const;
};

struct ZoomResult {
  AudioBuffer beamformed;     // mono beamformer output
  Spectrogram beamformed_spectrum;
  TfMap sigma2;
  std::optional<BlockThresholdResult> postfilter;
  AudioBuffer output;         // final signal before loudness normalization
  std::shared_ptr<const LinearStage> stage;  // beamformer with frozen parameters
  std::optional<FilterLengthSelection> sweep;
  std::size_t gjbf_length = 0;  // 0 for MPDR
};

// Throws "two channels required" unless the input has two channels.
ZoomResult run_zoom(const AudioBuffer& input, const PipelineConfig& config);

// Metrics of a run on a simulated scene. The reference for MSE is the target
// image at microphone 1.
EvalReport evaluate(const ZoomResult& result, const AudioBuffer& target_images,
                    const AudioBuffer& residual_images,
                    const PipelineConfig& config);

// Scales in place so the peak magnitude is at `peak_dbfs`; returns the gain.
// Silent input is left alone with gain 1.
double normalize_peak(AudioBuffer& audio, double peak_dbfs = -1.0);

struct ScenarioSource {
  std::string path;  // WAV file, or "synth:<seed>" for a generated signal
  double azimuth_deg = 90.0;
};

struct Scenario {
  ScenarioSource target{"synth:1", 90.0};
  std::vector<ScenarioSource> interferers;
  double sir_db = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> echo_t60_ms;
  std::optional<double> snr_db;
  double spacing_m = 0.10;
  int sample_rate = 16000;
  double synth_duration_s = 3.0;
  std::filesystem::path base_dir;  // relative WAV paths resolve against this
};

// Broadside synthetic target, one synthetic interferer at 60 degrees, 0 dB
// SIR, 10 cm spacing.
Scenario default_scenario();

// key=value lines, '#' comments. Keys: target, interferer (repeatable),
// sir_db, seed, echo_t60_ms, snr_db, spacing_m, sample_rate,
// synth_duration_s. Sources are "path,azimuth". Errors name the line:
// "<name>:<line>: ...".
Scenario parse_scenario(std::istream& in, const std::string& name,
                        const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

SimulatedScene simulate_scenario(const Scenario& scenario);

}  // namespace azoom

#endif  // AUDIOZOOM_PIPELINE_H_
