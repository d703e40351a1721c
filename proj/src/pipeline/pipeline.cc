#include "audiozoom/pipeline.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "audiozoom/error.h"

namespace azoom {
namespace {

std::string Num(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

std::string JoinLengths(const std::vector<std::size_t>& lengths) {
  std::string out;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(lengths[i]);
  }
  return out;
}

}  // namespace

std::string_view beamformer_name(BeamformerKind kind) {
  return kind == BeamformerKind::kMpdr ? "mpdr" : "gjbf";
}

BeamformerKind parse_beamformer(std::string_view name) {
  if (name == "mpdr") return BeamformerKind::kMpdr;
  if (name == "gjbf") return BeamformerKind::kGjbf;
  throw Error("unknown beamformer: " + std::string(name));
}

void PipelineConfig::validate() const {
  stft.validate();
  if (!satisfies_cola(stft)) throw Error("window does not satisfy COLA");
  if (!(mpdr.relative_loading >= 0.0)) throw Error("MPDR loading must be nonnegative");
  gjbf.validate();
  if (gjbf_auto && gjbf_sweep.size() < 2) {
    throw Error("at least two candidate lengths required");
  }
  bt.validate();
}

std::vector<std::pair<std::string, std::string>> PipelineConfig::describe() const {
  return {
      {"beamformer", std::string(beamformer_name(beamformer))},
      {"stft-frame", std::to_string(stft.frame_length)},
      {"stft-hop", std::to_string(stft.hop_length)},
      {"stft-window", std::string(window_name(stft.window))},
      {"mpdr-alpha", Num(mpdr.relative_loading)},
      {"gjbf-length", gjbf_auto ? "auto" : std::to_string(gjbf.filter_length)},
      {"gjbf-mu", Num(gjbf.step_size)},
      {"gjbf-sweep", JoinLengths(gjbf_sweep)},
      {"bt-enabled", bt_enabled ? "true" : "false"},
      {"bt-macro", std::to_string(bt.macro_frames) + "x" + std::to_string(bt.macro_bins)},
      {"bt-H", std::to_string(bt.h)},
      {"bt-threshold", Num(bt.zeta_threshold)},
      {"normalize", normalize_output ? "true" : "false"},
      {"seed", std::to_string(seed)},
  };
}

ZoomResult run_zoom(const AudioBuffer& input, const PipelineConfig& config) {
  if (input.channel_count() != 2) throw Error("two channels required");
  config.validate();
  const AudioBuffer ch1 = input.extract(0);
  const AudioBuffer ch2 = input.extract(1);
  const Spectrogram y1 = stft_padded(ch1, config.stft);
  const Spectrogram y2 = stft_padded(ch2, config.stft);

  ZoomResult result;
  if (config.beamformer == BeamformerKind::kMpdr) {
    const MpdrWeights weights =
        design_mpdr(estimate_covariance(y1, y2), broadside_steering(y1.bins()),
                    config.mpdr);
    result.beamformed = istft(apply_mpdr(y1, y2, weights));
    result.stage = std::make_shared<MpdrStage>(weights, config.stft);
  } else {
    GjbfConfig gjbf = config.gjbf;
    if (config.gjbf_auto) {
      result.sweep = select_filter_length(ch1, ch2, config.gjbf_sweep, gjbf,
                                          config.stft);
      gjbf.filter_length = result.sweep->best_length;
    }
    gjbf.record_trajectory = true;
    GjbfOutput run = fdaf_gjbf(ch1, ch2, gjbf);
    result.gjbf_length = gjbf.filter_length;
    result.stage = std::make_shared<GjbfStage>(std::move(*run.trajectory));
    result.beamformed = std::move(run.z);
  }

  result.beamformed_spectrum = stft_padded(result.beamformed, config.stft);
  result.sigma2 = residual_variance(y1, y2, result.beamformed_spectrum);
  if (config.bt_enabled) {
    result.postfilter =
        apply_block_threshold(result.beamformed_spectrum, result.sigma2, config.bt);
    result.output = istft(result.postfilter->output);
  } else {
    result.output = result.beamformed;
  }
  return result;
}

EvalReport evaluate(const ZoomResult& result, const AudioBuffer& target_images,
                    const AudioBuffer& residual_images,
                    const PipelineConfig& config) {
  if (!result.stage) throw Error("stage not freezable");
  const AudioBuffer reference = target_images.extract(0);
  const double input_sinr = osinr_db(target_images, residual_images);

  const Components bf = decompose_linear(*result.stage, target_images, residual_images);
  StageMetrics bf_metrics{osinr_db(bf.target, bf.residual),
                          mse_db(result.beamformed, reference)};
  std::optional<StageMetrics> pf_metrics;
  if (result.postfilter) {
    const Components pf =
        shadow_gain_decompose(result.postfilter->gains, bf, config.stft);
    pf_metrics = StageMetrics{osinr_db(pf.target, pf.residual),
                              mse_db(result.output, reference)};
  }
  return EvalReport::make(input_sinr, bf_metrics, pf_metrics);
}

double normalize_peak(AudioBuffer& audio, double peak_dbfs) {
  double peak = 0.0;
  for (std::size_t c = 0; c < audio.channel_count(); ++c) {
    for (double v : audio.channel(c)) peak = std::max(peak, std::abs(v));
  }
  if (peak == 0.0) return 1.0;
  const double gain = std::pow(10.0, peak_dbfs / 20.0) / peak;
  for (std::size_t c = 0; c < audio.channel_count(); ++c) {
    for (double& v : audio.channel(c)) v *= gain;
  }
  return gain;
}

}  // namespace azoom
