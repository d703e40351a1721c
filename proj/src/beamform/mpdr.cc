#include "audiozoom/mpdr.h"

#include <cmath>
#include <numbers>

#include "audiozoom/error.h"
#include "audiozoom/simd/kernels.h"

namespace azoom {

std::vector<BinCovariance> estimate_covariance(const Spectrogram& ch1,
                                               const Spectrogram& ch2) {
  if (!ch1.same_shape(ch2)) throw Error("spectrogram dimensions differ");
  const std::size_t frames = ch1.frames();
  if (frames == 0) throw Error("no frames");
  const std::size_t bins = ch1.bins();
  std::vector<double> r11(bins, 0.0), r22(bins, 0.0);
  std::vector<std::complex<double>> r12(bins);
  for (std::size_t k = 0; k < frames; ++k) {
    simd::accumulate_covariance(ch1.frame(k), ch2.frame(k), r11, r22, r12);
  }
  const double inv_k = 1.0 / static_cast<double>(frames);
  std::vector<BinCovariance> out(bins);
  for (std::size_t f = 0; f < bins; ++f) {
    const std::complex<double> c = r12[f] * inv_k;
    out[f].matrix = {r11[f] * inv_k, c, std::conj(c), r22[f] * inv_k};
    out[f].frequency_bin = f;
    out[f].frame_count = frames;
  }
  return out;
}

Complex2 mpdr_weights(const BinCovariance& cov, const Complex2& steering,
                      double alpha) {
  if (!(alpha >= 0.0)) throw Error("diagonal loading must be nonnegative");
  const std::complex<double> a11 = cov(0, 0) + alpha;
  const std::complex<double> a12 = cov(0, 1);
  const std::complex<double> a21 = cov(1, 0);
  const std::complex<double> a22 = cov(1, 1) + alpha;
  const std::complex<double> det = a11 * a22 - a12 * a21;
  const double scale = std::abs(a11) + std::abs(a22) + std::abs(a12) + std::abs(a21);
  if (!(std::abs(det) > 1e-14 * scale * scale)) {
    throw Error("degenerate covariance; increase loading");
  }
  // (R + alpha I)^-1 d through the adjugate.
  const std::complex<double> u0 = (a22 * steering[0] - a12 * steering[1]) / det;
  const std::complex<double> u1 = (-a21 * steering[0] + a11 * steering[1]) / det;
  const std::complex<double> denom =
      std::conj(steering[0]) * u0 + std::conj(steering[1]) * u1;
  if (!(std::abs(denom) > 0.0) || !std::isfinite(std::abs(denom))) {
    throw Error("degenerate covariance; increase loading");
  }
  // d^H (R + alpha I)^-1 d is real for Hermitian R; dividing by the complex
  // value keeps W^H d = 1 exact even with rounding in the imaginary part.
  return {u0 / denom, u1 / denom};
}

std::vector<Complex2> broadside_steering(std::size_t bins) {
  return std::vector<Complex2>(bins, Complex2{1.0, 1.0});
}

std::vector<Complex2> steering_for_bins(const ArrayGeometry& geometry,
                                        double azimuth_deg,
                                        const StftParams& params,
                                        int sample_rate) {
  if (geometry.mic_count() != 2) throw Error("MPDR supports two microphones");
  std::vector<Complex2> out(params.bins());
  for (std::size_t f = 0; f < out.size(); ++f) {
    const double hz = static_cast<double>(f) * sample_rate /
                      static_cast<double>(params.frame_length);
    const auto d = steering_vector(geometry, azimuth_deg, hz);
    out[f] = {d[0], d[1]};
  }
  return out;
}

MpdrWeights design_mpdr(const std::vector<BinCovariance>& covariances,
                        const std::vector<Complex2>& steering,
                        const MpdrOptions& options) {
  if (covariances.size() != steering.size()) {
    throw Error("steering and covariance bin counts differ");
  }
  if (!(options.relative_loading >= 0.0)) {
    throw Error("relative loading must be nonnegative");
  }
  MpdrWeights out;
  out.steering = steering;
  out.weights.resize(steering.size());
  out.loading.resize(steering.size());
  for (std::size_t f = 0; f < steering.size(); ++f) {
    const BinCovariance& cov = covariances[f];
    const double alpha = options.relative_loading * cov.trace() / 2.0;
    out.loading[f] = alpha;
    if (cov.trace() == 0.0) {
      const auto& d = steering[f];
      const double norm2 = std::norm(d[0]) + std::norm(d[1]);
      out.weights[f] = {d[0] / norm2, d[1] / norm2};
      continue;
    }
    out.weights[f] = mpdr_weights(cov, steering[f], alpha);
  }
  return out;
}

Spectrogram apply_mpdr(const Spectrogram& ch1, const Spectrogram& ch2,
                       const MpdrWeights& weights) {
  if (!ch1.same_shape(ch2)) throw Error("spectrogram dimensions differ");
  if (weights.weights.size() != ch1.bins()) {
    throw Error("weight count does not match bin count");
  }
  const std::size_t bins = ch1.bins();
  std::vector<std::complex<double>> w1(bins), w2(bins);
  for (std::size_t f = 0; f < bins; ++f) {
    w1[f] = weights.weights[f][0];
    w2[f] = weights.weights[f][1];
  }
  Spectrogram out(ch1.frames(), ch1.params(), ch1.sample_rate(),
                  ch1.signal_length(), ch1.leading_padding());
  for (std::size_t k = 0; k < ch1.frames(); ++k) {
    simd::beamform2(w1, w2, ch1.frame(k), ch2.frame(k), out.frame(k));
  }
  return out;
}

}  // namespace azoom
