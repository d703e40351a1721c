#ifndef AUDIOZOOM_MPDR_H_
#define AUDIOZOOM_MPDR_H_

// Minimum power distortionless response beamformer for two microphones.
// The data covariance of every frequency bin is estimated over the whole
// utterance; the weights minimize output power subject to unit gain towards
// the target steering vector, with diagonal loading:
//
//   W = (R + alpha I)^-1 d / (d^H (R + alpha I)^-1 d)

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include "audiozoom/simulate.h"
#include "audiozoom/stft.h"

namespace azoom {

using Complex2 = std::array<std::complex<double>, 2>;

// 2x2 complex matrix, row-major: m[0] m[1] / m[2] m[3].
struct BinCovariance {
  std::array<std::complex<double>, 4> matrix{};
  std::size_t frequency_bin = 0;
  std::size_t frame_count = 0;

  std::complex<double> operator()(std::size_t row, std::size_t col) const {
    return matrix[row * 2 + col];
  }
  double trace() const { return matrix[0].real() + matrix[3].real(); }
};

struct MpdrWeights {
  std::vector<Complex2> weights;   // per bin
  std::vector<double> loading;     // alpha actually used, per bin
  std::vector<Complex2> steering;  // per bin
};

// R_f = (1/K) sum_k Y(f,k) Y(f,k)^H with Y = [Y1, Y2]^T over all K frames.
// Throws "no frames" when K = 0.
std::vector<BinCovariance> estimate_covariance(const Spectrogram& ch1,
                                               const Spectrogram& ch2);

// Closed-form 2x2 solve. Throws "degenerate covariance; increase loading"
// when R + alpha I is singular.
Complex2 mpdr_weights(const BinCovariance& cov, const Complex2& steering,
                      double alpha);

// Broadside steering [1, 1] for every bin.
std::vector<Complex2> broadside_steering(std::size_t bins);

// Steering vectors for a direction on a given array, per STFT bin.
std::vector<Complex2> steering_for_bins(const ArrayGeometry& geometry,
                                        double azimuth_deg,
                                        const StftParams& params,
                                        int sample_rate);

struct MpdrOptions {
  // alpha_f = relative_loading * trace(R_f) / 2
  double relative_loading = 1e-2;
};

// Weights for every bin. Bins whose covariance is all zero (silent input) get
// the loading-dominated limit d / |d|^2.
MpdrWeights design_mpdr(const std::vector<BinCovariance>& covariances,
                        const std::vector<Complex2>& steering,
                        const MpdrOptions& options = {});

// Z(f, v) = W(f)^H [Y1(f, v), Y2(f, v)]^T
Spectrogram apply_mpdr(const Spectrogram& ch1, const Spectrogram& ch2,
                       const MpdrWeights& weights);

}  // namespace azoom

#endif  // AUDIOZOOM_MPDR_H_
