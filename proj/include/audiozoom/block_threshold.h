#ifndef AUDIOZOOM_BLOCK_THRESHOLD_H_
#define AUDIOZOOM_BLOCK_THRESHOLD_H_

// Block-thresholding post-filter. The time-frequency plane is cut into
// macro-blocks of P frames by Q bins. Each macro-block is divided into
// sub-blocks of 2^(H-v) frames by 2^v bins for the v that works best, and
// every coefficient of a sub-block is scaled by the same gain
//
//   a = 1 - 1 / (zeta + 1),   zeta = max(mean|Z|^2 / mean sigma^2 - 1, 0)

#include <cstddef>
#include <ostream>
#include <vector>

#include "audiozoom/stft.h"

namespace azoom {

// 0.5 * (|Y1 - Z|^2 + |Y2 - Z|^2) per coefficient.
TfMap residual_variance(const Spectrogram& y1, const Spectrogram& y2,
                        const Spectrogram& z);

// 1e-12 * mean |Z|^2. Variances at or below this are treated as zero.
double variance_floor(const Spectrogram& z);

// Rectangle of coefficients. Offsets are relative to whatever it lives in.
struct TfRegion {
  std::size_t frame0 = 0;
  std::size_t bin0 = 0;
  std::size_t frames = 0;
  std::size_t bins = 0;
};

struct Tiling {
  int v = 0;
  std::size_t sub_frames = 0;  // 2^(H - v)
  std::size_t sub_bins = 0;    // 2^v
  std::vector<TfRegion> blocks;  // relative to the macro-block, frame-major
};

// One tiling per v in [0, H] whose sub-block shape divides P x Q, ordered by
// v. Throws "macro-block incompatible with H" when there is none.
std::vector<Tiling> enumerate_partitions(std::size_t macro_frames,
                                         std::size_t macro_bins, int h);

inline constexpr double kZetaSentinel = 1e6;

// zeta per sub-block of `tiling` placed at `macro`. Sub-blocks whose mean
// variance is at or below `floor` get kZetaSentinel.
std::vector<double> block_snr(const Spectrogram& z, const TfMap& sigma2,
                              const TfRegion& macro, const Tiling& tiling,
                              double floor);

// 1 - 1 / (zeta + 1), clamped to [0, 1].
double attenuation_factor(double zeta);

struct PartitionChoice {
  std::size_t tiling_index = 0;
  int v = 0;
  std::size_t above_threshold = 0;
  double mean_zeta_above = 0.0;  // 0 when no sub-block passes
  std::vector<double> zeta;
  std::vector<double> gains;
};

// Picks the tiling whose above-threshold sub-blocks have the highest mean
// zeta. Ties go to more above-threshold sub-blocks, then to the smaller v.
PartitionChoice choose_partition(const Spectrogram& z, const TfMap& sigma2,
                                 const TfRegion& macro,
                                 const std::vector<Tiling>& tilings,
                                 double zeta_threshold, double floor);

struct BlockThresholdParams {
  std::size_t macro_frames = 8;  // P
  std::size_t macro_bins = 16;   // Q
  int h = 4;
  double zeta_threshold = 1.0;

  // Also checks that the full macro-block admits some tiling.
  void validate() const;
};

struct MacroBlockDecision {
  TfRegion region;  // absolute
  int h = 0;        // H actually used; smaller than requested on edges
  int v = 0;
  std::size_t above_threshold = 0;
  std::vector<double> gains;  // per sub-block, frame-major
};

struct BlockThresholdResult {
  Spectrogram output;
  TfMap gains;
  std::vector<MacroBlockDecision> decisions;
};

// Macro-blocks cut short by the spectrogram border use the largest H' <= H
// that tiles them; H' = 0 means one gain per coefficient.
BlockThresholdResult apply_block_threshold(const Spectrogram& z,
                                           const TfMap& sigma2,
                                           const BlockThresholdParams& params);

// frame0,bin0,frames,bins,h,v,above_threshold,gains (gains ';'-separated)
void write_block_decisions_csv(std::ostream& out,
                               const BlockThresholdResult& result);

}  // namespace azoom

#endif  // AUDIOZOOM_BLOCK_THRESHOLD_H_
