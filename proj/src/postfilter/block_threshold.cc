#include "audiozoom/block_threshold.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "audiozoom/error.h"
#include "audiozoom/simd/kernels.h"

namespace azoom {
namespace {

bool Divides(std::size_t d, std::size_t n) { return d != 0 && n % d == 0; }

constexpr double kTieTolerance = 1e-12;

bool NearlyEqual(double a, double b) {
  return std::abs(a - b) <= kTieTolerance * std::max(std::abs(a), std::abs(b));
}

std::vector<Tiling> FeasibleTilings(std::size_t p, std::size_t q, int h) {
  std::vector<Tiling> tilings;
  for (int v = 0; v <= h; ++v) {
    Tiling t;
    t.v = v;
    t.sub_frames = std::size_t{1} << (h - v);
    t.sub_bins = std::size_t{1} << v;
    if (!Divides(t.sub_frames, p) || !Divides(t.sub_bins, q)) continue;
    for (std::size_t f = 0; f < p; f += t.sub_frames) {
      for (std::size_t b = 0; b < q; b += t.sub_bins) {
        t.blocks.push_back({f, b, t.sub_frames, t.sub_bins});
      }
    }
    tilings.push_back(std::move(t));
  }
  return tilings;
}

}  // namespace

TfMap residual_variance(const Spectrogram& y1, const Spectrogram& y2,
                        const Spectrogram& z) {
  if (!y1.same_shape(y2) || !y1.same_shape(z)) {
    throw Error("spectrogram dimensions differ");
  }
  TfMap out(z.bins(), z.frames());
  simd::residual_variance(y1.coefficients(), y2.coefficients(),
                          z.coefficients(), out.values());
  return out;
}

double variance_floor(const Spectrogram& z) {
  const auto c = z.coefficients();
  if (c.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& x : c) sum += std::norm(x);
  return 1e-12 * sum / static_cast<double>(c.size());
}

std::vector<Tiling> enumerate_partitions(std::size_t macro_frames,
                                         std::size_t macro_bins, int h) {
  if (h < 0) throw Error("H must be nonnegative");
  if (h >= 31) throw Error("macro-block incompatible with H");
  if (macro_frames * macro_bins < (std::size_t{1} << h)) {
    throw Error("macro-block incompatible with H");
  }
  auto tilings = FeasibleTilings(macro_frames, macro_bins, h);
  if (tilings.empty()) throw Error("macro-block incompatible with H");
  return tilings;
}

std::vector<double> block_snr(const Spectrogram& z, const TfMap& sigma2,
                              const TfRegion& macro, const Tiling& tiling,
                              double floor) {
  if (!z.same_shape(sigma2)) throw Error("variance map dimensions differ");
  if (macro.frame0 + macro.frames > z.frames() ||
      macro.bin0 + macro.bins > z.bins()) {
    throw Error("macro-block outside spectrogram");
  }
  std::vector<double> zeta;
  zeta.reserve(tiling.blocks.size());
  for (const TfRegion& b : tiling.blocks) {
    if (b.frame0 + b.frames > macro.frames || b.bin0 + b.bins > macro.bins) {
      throw Error("tiling does not fit the macro-block");
    }
    double power = 0.0, variance = 0.0;
    for (std::size_t f = 0; f < b.frames; ++f) {
      const std::size_t frame = macro.frame0 + b.frame0 + f;
      for (std::size_t k = 0; k < b.bins; ++k) {
        const std::size_t bin = macro.bin0 + b.bin0 + k;
        power += std::norm(z.at(bin, frame));
        variance += sigma2.at(bin, frame);
      }
    }
    const double count = static_cast<double>(b.frames * b.bins);
    power /= count;
    variance /= count;
    if (variance <= floor) {
      zeta.push_back(kZetaSentinel);
    } else {
      zeta.push_back(std::max(power / variance - 1.0, 0.0));
    }
  }
  return zeta;
}

double attenuation_factor(double zeta) {
  if (!(zeta > 0.0)) return 0.0;
  return std::clamp(1.0 - 1.0 / (zeta + 1.0), 0.0, 1.0);
}

PartitionChoice choose_partition(const Spectrogram& z, const TfMap& sigma2,
                                 const TfRegion& macro,
                                 const std::vector<Tiling>& tilings,
                                 double zeta_threshold, double floor) {
  if (tilings.empty()) throw Error("no tilings to choose from");
  PartitionChoice best;
  bool have_best = false;
  for (std::size_t i = 0; i < tilings.size(); ++i) {
    PartitionChoice c;
    c.tiling_index = i;
    c.v = tilings[i].v;
    c.zeta = block_snr(z, sigma2, macro, tilings[i], floor);
    double sum = 0.0;
    for (double zeta : c.zeta) {
      if (zeta > zeta_threshold) {
        ++c.above_threshold;
        sum += zeta;
      }
    }
    if (c.above_threshold > 0) {
      c.mean_zeta_above = sum / static_cast<double>(c.above_threshold);
    }
    bool better = !have_best;
    if (have_best) {
      if (!NearlyEqual(c.mean_zeta_above, best.mean_zeta_above)) {
        better = c.mean_zeta_above > best.mean_zeta_above;
      } else if (c.above_threshold != best.above_threshold) {
        better = c.above_threshold > best.above_threshold;
      } else {
        better = c.v < best.v;
      }
    }
    if (better) {
      best = std::move(c);
      have_best = true;
    }
  }
  best.gains.resize(best.zeta.size());
  std::transform(best.zeta.begin(), best.zeta.end(), best.gains.begin(),
                 attenuation_factor);
  return best;
}

void BlockThresholdParams::validate() const {
  if (macro_frames < 1 || macro_bins < 1) {
    throw Error("macro-block dimensions must be positive");
  }
  if (!(zeta_threshold >= 0.0)) throw Error("threshold must be nonnegative");
  enumerate_partitions(macro_frames, macro_bins, h);
}

BlockThresholdResult apply_block_threshold(const Spectrogram& z,
                                           const TfMap& sigma2,
                                           const BlockThresholdParams& params) {
  params.validate();
  if (!z.same_shape(sigma2)) throw Error("variance map dimensions differ");
  for (double s : sigma2.values()) {
    if (!(s >= 0.0)) throw Error("variance map has negative entries");
  }
  const double floor = variance_floor(z);

  // Edge macro-blocks come in at most three extra shapes; remember their
  // tilings.
  std::map<std::pair<std::size_t, std::size_t>, std::pair<int, std::vector<Tiling>>> cache;
  auto tilings_for = [&](std::size_t p, std::size_t q)
      -> const std::pair<int, std::vector<Tiling>>& {
    auto key = std::make_pair(p, q);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    for (int h = params.h; h >= 0; --h) {
      auto t = FeasibleTilings(p, q, h);
      if (!t.empty()) {
        return cache.emplace(key, std::make_pair(h, std::move(t))).first->second;
      }
    }
    throw Error("no tiling for edge block");  // h = 0 always tiles
  };

  BlockThresholdResult result;
  result.gains = TfMap(z.bins(), z.frames(), 0.0);
  for (std::size_t f0 = 0; f0 < z.frames(); f0 += params.macro_frames) {
    for (std::size_t b0 = 0; b0 < z.bins(); b0 += params.macro_bins) {
      TfRegion macro{f0, b0, std::min(params.macro_frames, z.frames() - f0),
                     std::min(params.macro_bins, z.bins() - b0)};
      const auto& [h, tilings] = tilings_for(macro.frames, macro.bins);
      PartitionChoice choice = choose_partition(z, sigma2, macro, tilings,
                                                params.zeta_threshold, floor);
      const Tiling& tiling = tilings[choice.tiling_index];
      for (std::size_t i = 0; i < tiling.blocks.size(); ++i) {
        const TfRegion& b = tiling.blocks[i];
        for (std::size_t f = 0; f < b.frames; ++f) {
          for (std::size_t k = 0; k < b.bins; ++k) {
            result.gains.at(macro.bin0 + b.bin0 + k, macro.frame0 + b.frame0 + f) =
                choice.gains[i];
          }
        }
      }
      result.decisions.push_back(MacroBlockDecision{
          macro, h, choice.v, choice.above_threshold, std::move(choice.gains)});
    }
  }

  result.output = z;
  for (std::size_t f = 0; f < z.frames(); ++f) {
    simd::apply_gain(result.gains.frame(f), z.frame(f), result.output.frame(f));
  }
  return result;
}

void write_block_decisions_csv(std::ostream& out,
                               const BlockThresholdResult& result) {
  out << "frame0,bin0,frames,bins,h,v,above_threshold,gains\n";
  for (const auto& d : result.decisions) {
    out << d.region.frame0 << ',' << d.region.bin0 << ',' << d.region.frames
        << ',' << d.region.bins << ',' << d.h << ',' << d.v << ','
        << d.above_threshold << ',';
    for (std::size_t i = 0; i < d.gains.size(); ++i) {
      if (i) out << ';';
      out << d.gains[i];
    }
    out << '\n';
  }
}

}  // namespace azoom
