#include "audiozoom/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "audiozoom/convolve.h"
#include "audiozoom/error.h"
#include "audiozoom/simd/kernels.h"

namespace azoom {
namespace {

double RatioDb(double num, double den) {
  if (num == 0.0 && den == 0.0) return 0.0;
  if (den == 0.0) return kDbCap;
  if (num == 0.0) return -kDbCap;
  return std::clamp(10.0 * std::log10(num / den), -kDbCap, kDbCap);
}

void CheckTwoChannel(const AudioBuffer& input) {
  if (input.channel_count() != 2) throw Error("two channels required");
}

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

MpdrStage::MpdrStage(MpdrWeights weights, StftParams params)
    : weights_(std::move(weights)), params_(params) {
  params_.validate();
}

AudioBuffer MpdrStage::apply(const AudioBuffer& input) const {
  CheckTwoChannel(input);
  const Spectrogram y1 = stft_padded(input.extract(0), params_);
  const Spectrogram y2 = stft_padded(input.extract(1), params_);
  return istft(apply_mpdr(y1, y2, weights_));
}

GjbfStage::GjbfStage(GjbfTrajectory trajectory)
    : trajectory_(std::move(trajectory)) {}

AudioBuffer GjbfStage::apply(const AudioBuffer& input) const {
  CheckTwoChannel(input);
  return replay_gjbf(trajectory_, input.extract(0), input.extract(1));
}

std::unique_ptr<LinearStage> freeze(const GjbfOutput& run) {
  if (!run.trajectory) throw Error("stage not freezable");
  return std::make_unique<GjbfStage>(*run.trajectory);
}

Components decompose_linear(const LinearStage& stage,
                            const AudioBuffer& target_images,
                            const AudioBuffer& residual_images) {
  if (target_images.channel_count() != residual_images.channel_count() ||
      target_images.frames() != residual_images.frames()) {
    throw Error("image dimensions differ");
  }
  return {stage.apply(target_images), stage.apply(residual_images)};
}

double superposition_error(const Components& parts, const AudioBuffer& mixture) {
  const AudioBuffer sum = add(parts.target, parts.residual);
  if (sum.channel_count() != mixture.channel_count() ||
      sum.frames() != mixture.frames()) {
    throw Error("component dimensions differ from mixture");
  }
  double max_err = 0.0, max_ref = 0.0;
  for (std::size_t c = 0; c < sum.channel_count(); ++c) {
    const auto s = sum.channel(c);
    const auto m = mixture.channel(c);
    for (std::size_t n = 0; n < s.size(); ++n) {
      max_err = std::max(max_err, std::abs(s[n] - m[n]));
      max_ref = std::max(max_ref, std::abs(m[n]));
    }
  }
  if (max_ref == 0.0) return max_err;
  return max_err / max_ref;
}

std::pair<Spectrogram, Spectrogram> shadow_gain_decompose(
    const TfMap& gains, const Spectrogram& target, const Spectrogram& residual) {
  if (!target.same_shape(residual) || !target.same_shape(gains)) {
    throw Error("spectrogram dimensions differ");
  }
  for (double g : gains.values()) {
    if (!(g >= 0.0 && g <= 1.0)) throw Error("gains must lie in [0, 1]");
  }
  Spectrogram t = target, r = residual;
  simd::apply_gain(gains.values(), target.coefficients(), t.coefficients());
  simd::apply_gain(gains.values(), residual.coefficients(), r.coefficients());
  return {std::move(t), std::move(r)};
}

Components shadow_gain_decompose(const TfMap& gains, const Components& parts,
                                 const StftParams& params) {
  auto [t, r] = shadow_gain_decompose(gains, stft_padded(parts.target, params),
                                      stft_padded(parts.residual, params));
  return {istft(t), istft(r)};
}

double osinr_db(const AudioBuffer& target, const AudioBuffer& residual) {
  if (target.channel_count() != residual.channel_count() ||
      target.frames() != residual.frames()) {
    throw Error("component dimensions differ");
  }
  return RatioDb(energy(target), energy(residual));
}

double osinr_db(const Spectrogram& target, const Spectrogram& residual) {
  if (!target.same_shape(residual)) throw Error("spectrogram dimensions differ");
  double t = 0.0, r = 0.0;
  for (const auto& c : target.coefficients()) t += std::norm(c);
  for (const auto& c : residual.coefficients()) r += std::norm(c);
  return RatioDb(t, r);
}

namespace {

struct Overlap {
  std::ptrdiff_t lo = 0;
  std::ptrdiff_t hi = 0;
};

Overlap OverlapOf(std::size_t estimate_len, std::size_t reference_len,
                  std::ptrdiff_t lag) {
  return {std::max<std::ptrdiff_t>(0, -lag),
          std::min(static_cast<std::ptrdiff_t>(reference_len),
                   static_cast<std::ptrdiff_t>(estimate_len) - lag)};
}

}  // namespace

Alignment align_to_reference(const AudioBuffer& estimate,
                             const AudioBuffer& reference, std::size_t max_lag) {
  if (estimate.channel_count() != 1 || reference.channel_count() != 1) {
    throw Error("alignment expects mono signals");
  }
  const auto e = estimate.channel(0);
  const auto s = reference.channel(0);
  const std::size_t diff = e.size() > s.size() ? e.size() - s.size()
                                               : s.size() - e.size();
  if (diff > max_lag) throw Error("length mismatch exceeds alignment bound");
  if (simd::sum_squares(s) == 0.0) throw Error("reference signal is zero");

  const std::vector<double> xc = fft_cross_correlation(e, s, max_lag);
  Alignment a;
  double best_abs = std::abs(xc[max_lag]);
  const auto lag_max = static_cast<std::ptrdiff_t>(max_lag);
  // Scan outward from zero lag so ties keep the smallest shift.
  for (std::ptrdiff_t d = 1; d <= lag_max; ++d) {
    for (std::ptrdiff_t k : {d, -d}) {
      const double v = std::abs(xc[static_cast<std::size_t>(k + lag_max)]);
      if (v > best_abs * (1.0 + 1e-12)) {
        best_abs = v;
        a.lag = k;
      }
    }
  }
  const Overlap o = OverlapOf(e.size(), s.size(), a.lag);
  double ee = 0.0, es = 0.0;
  for (std::ptrdiff_t n = o.lo; n < o.hi; ++n) {
    const double x = e[static_cast<std::size_t>(n + a.lag)];
    ee += x * x;
    es += x * s[static_cast<std::size_t>(n)];
  }
  a.gain = ee > 0.0 ? es / ee : 0.0;
  return a;
}

double mse_db(const AudioBuffer& estimate, const AudioBuffer& reference,
              std::size_t max_lag) {
  const Alignment a = align_to_reference(estimate, reference, max_lag);
  const auto e = estimate.channel(0);
  const auto s = reference.channel(0);
  const Overlap o = OverlapOf(e.size(), s.size(), a.lag);
  double err = 0.0, ss = 0.0;
  for (std::ptrdiff_t n = o.lo; n < o.hi; ++n) {
    const double ref = s[static_cast<std::size_t>(n)];
    const double d = a.gain * e[static_cast<std::size_t>(n + a.lag)] - ref;
    err += d * d;
    ss += ref * ref;
  }
  if (ss == 0.0) return 0.0;
  if (err == 0.0) return -kDbCap;
  return std::max(10.0 * std::log10(err / ss), -kDbCap);
}

Components project_onto_reference(const AudioBuffer& estimate,
                                  const AudioBuffer& reference,
                                  std::size_t max_lag) {
  const Alignment a = align_to_reference(estimate, reference, max_lag);
  const auto e = estimate.channel(0);
  const auto s = reference.channel(0);
  const Overlap o = OverlapOf(e.size(), s.size(), a.lag);
  double es = 0.0, ss = 0.0;
  for (std::ptrdiff_t n = o.lo; n < o.hi; ++n) {
    const double ref = s[static_cast<std::size_t>(n)];
    es += e[static_cast<std::size_t>(n + a.lag)] * ref;
    ss += ref * ref;
  }
  const double c = ss > 0.0 ? es / ss : 0.0;
  Components out{AudioBuffer(1, e.size(), estimate.sample_rate()),
                 AudioBuffer(1, e.size(), estimate.sample_rate())};
  auto t = out.target.channel(0);
  for (std::ptrdiff_t n = o.lo; n < o.hi; ++n) {
    t[static_cast<std::size_t>(n + a.lag)] = c * s[static_cast<std::size_t>(n)];
  }
  auto r = out.residual.channel(0);
  for (std::size_t n = 0; n < e.size(); ++n) r[n] = e[n] - t[n];
  return out;
}

EvalReport EvalReport::make(double input_sinr_db, const StageMetrics& beamformer,
                            const std::optional<StageMetrics>& postfilter) {
  EvalReport r;
  r.input_sinr_db = input_sinr_db;
  r.beamformer = beamformer;
  r.postfilter = postfilter;
  const StageMetrics& final_stage = postfilter ? *postfilter : beamformer;
  r.osinr_db = final_stage.osinr_db;
  r.mse_db = final_stage.mse_db;
  r.sinr_gain_db = r.osinr_db - r.input_sinr_db;
  return r;
}

std::string report_csv_header() {
  return "osinr_db,input_sinr_db,sinr_gain_db,mse_db,bf_osinr_db,bf_mse_db,"
         "pf_osinr_db,pf_mse_db";
}

std::string report_csv_row(const EvalReport& r) {
  std::string row = FormatDouble(r.osinr_db) + ',' + FormatDouble(r.input_sinr_db) +
                    ',' + FormatDouble(r.sinr_gain_db) + ',' + FormatDouble(r.mse_db) +
                    ',' + FormatDouble(r.beamformer.osinr_db) + ',' +
                    FormatDouble(r.beamformer.mse_db) + ',';
  if (r.postfilter) {
    row += FormatDouble(r.postfilter->osinr_db) + ',' + FormatDouble(r.postfilter->mse_db);
  } else {
    row += ",";
  }
  return row;
}

void print_report(std::ostream& out, const EvalReport& r) {
  auto line = [&](const char* label, double v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-22s %9.2f dB\n", label, v);
    out << buf;
  };
  line("input SINR", r.input_sinr_db);
  line("output SINR", r.osinr_db);
  line("SINR gain", r.sinr_gain_db);
  line("MSE", r.mse_db);
  line("beamformer OSINR", r.beamformer.osinr_db);
  line("beamformer MSE", r.beamformer.mse_db);
  if (r.postfilter) {
    line("post-filter OSINR", r.postfilter->osinr_db);
    line("post-filter MSE", r.postfilter->mse_db);
  }
}

}  // namespace azoom
