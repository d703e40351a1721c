// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "audiozoom/block_threshold.h"
#include "audiozoom/fft.h"
#include "audiozoom/gjbf.h"
#include "audiozoom/mpdr.h"
#include "audiozoom/pipeline.h"
#include "audiozoom/stft.h"
#include "test_util.h"

namespace azoom {
namespace {

using cd = std::complex<double>;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

AudioBuffer Mono(const std::vector<double>& v) { return AudioBuffer::mono(v, 16000); }

// Criterion 1: STFT round trip.
Outcome StftReconstruction() {
  const StftParams p{512, 256, WindowType::kSqrtHann};
  const AudioBuffer x = testing::RandomMono(16000, 1);
  const AudioBuffer y = istft(stft(x, p));
  double err = 0.0;
  for (std::size_t n = p.frame_length; n + p.frame_length < x.frames(); ++n) {
    err = std::max(err, std::abs(x.channel(0)[n] - y.channel(0)[n]));
  }
  const AudioBuffer yp = istft(stft_padded(x, p));
  const double err_padded = testing::MaxAbsDiff(x.channel(0), yp.channel(0));
  return {err <= 1e-9 && err_padded <= 1e-9,
          Format("interior max error %.3g, padded max error %.3g", err, err_padded)};
}

// w^H R w for a 2x2 row-major matrix.
double OutputPower(const Complex2& w, const BinCovariance& r) {
  cd acc = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) acc += std::conj(w[i]) * r(i, j) * w[j];
  }
  return acc.real();
}

cd Response(const Complex2& w, const Complex2& d) {
  return std::conj(w[0]) * d[0] + std::conj(w[1]) * d[1];
}

// Criterion 2: distortionless response on the default scene, and minimum
// output power among constrained weights.
Outcome MpdrDistortionlessAndOptimal() {
  const SimulatedScene scene = simulate_scenario(default_scenario());
  const StftParams p;
  const Spectrogram y1 = stft_padded(scene.mixture.extract(0), p);
  const Spectrogram y2 = stft_padded(scene.mixture.extract(1), p);
  const auto steering = broadside_steering(y1.bins());
  const MpdrWeights w = design_mpdr(estimate_covariance(y1, y2), steering);
  double worst_response = 0.0;
  for (std::size_t k = 0; k < w.weights.size(); ++k) {
    worst_response = std::max(worst_response, std::abs(Response(w.weights[k], steering[k]) - 1.0));
  }

  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> freq(0.0, 8000.0), angle(0.0, 180.0);
  const ArrayGeometry geometry = ArrayGeometry::two_mic();
  std::size_t violations = 0;
  double worst_margin = 1e300;
  for (int m = 0; m < 50; ++m) {
    // R = A A^H with a random complex A.
    cd a[4];
    for (auto& v : a) v = {g(rng), g(rng)};
    BinCovariance r;
    r.matrix[0] = std::norm(a[0]) + std::norm(a[1]);
    r.matrix[1] = a[0] * std::conj(a[2]) + a[1] * std::conj(a[3]);
    r.matrix[2] = std::conj(r.matrix[1]);
    r.matrix[3] = std::norm(a[2]) + std::norm(a[3]);
    const auto sv = steering_vector(geometry, angle(rng), freq(rng));
    const Complex2 d{sv[0], sv[1]};
    const Complex2 best = mpdr_weights(r, d, 0.0);
    const double best_power = OutputPower(best, r);
    // Constrained weights: d / |d|^2 plus any multiple of the vector
    // orthogonal to d.
    const double dn = std::norm(d[0]) + std::norm(d[1]);
    const Complex2 base{d[0] / dn, d[1] / dn};
    const Complex2 ortho{-std::conj(d[1]), std::conj(d[0])};
    for (int t = 0; t < 1000; ++t) {
      const cd b{g(rng), g(rng)};
      const Complex2 cand{base[0] + b * ortho[0], base[1] + b * ortho[1]};
      const double margin = OutputPower(cand, r) - best_power;
      worst_margin = std::min(worst_margin, margin / best_power);
      if (margin < -1e-12 * best_power) ++violations;
    }
  }
  return {worst_response <= 1e-9 && violations == 0,
          Format("max |W^H d - 1| = %.3g over %zu bins; %zu of 50000 constrained weights beat "
                 "MPDR (min relative excess %.3g)",
                 worst_response, w.weights.size(), violations, worst_margin)};
}

// Criterion 3: overlap-save FDAF against time-domain block LMS.
Outcome FdafMatchesBlockLms() {
  const std::size_t taps = 8, block = 8, delay = 4, blocks = 10;
  const std::size_t len = blocks * block - delay;
  const double mu = 0.01;
  const auto y1 = testing::RandomSignal(len, 31);
  const auto y2 = testing::RandomSignal(len, 32);
  std::vector<double> x(blocks * block, 0.0), d(blocks * block, 0.0);
  for (std::size_t n = 0; n < len; ++n) {
    x[n] = y1[n] - y2[n];
    d[n + delay] = 0.5 * (y1[n] + y2[n]);
  }
  const auto history = testing::BlockLms(x, d, taps, block, mu);

  GjbfConfig cfg;
  cfg.filter_length = taps;
  cfg.block_size = block;
  cfg.alignment_delay = delay;
  cfg.step_size = mu;
  cfg.normalized = false;
  cfg.record_trajectory = true;
  const GjbfOutput out = fdaf_gjbf(Mono(y1), Mono(y2), cfg);
  if (history.size() != blocks || out.trajectory->weights.size() != blocks) {
    return {false, Format("block count mismatch: oracle %zu, FDAF %zu", history.size(),
                          out.trajectory->weights.size())};
  }
  // Tap vectors after every block: trajectory entry j + 1 holds the taps
  // after block j, and the final state holds the last.
  RealFft fft(taps + block);
  std::vector<double> w(taps + block);
  double worst = 0.0;
  for (std::size_t j = 0; j < blocks; ++j) {
    std::vector<double> got;
    if (j + 1 < blocks) {
      fft.inverse(out.trajectory->weights[j + 1], w);
      got.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(taps));
    } else {
      got = out.final_state.taps;
    }
    const double scale = testing::MaxAbs(history[j]);
    for (std::size_t i = 0; i < taps; ++i) {
      worst = std::max(worst, std::abs(got[i] - history[j][i]) / scale);
    }
  }
  return {worst <= 1e-6, Format("max relative tap error %.3g over %zu blocks", worst, blocks)};
}

// Criterion 4: identical channels block to zero and the output is the fixed
// path.
Outcome BlockingInvariant() {
  const AudioBuffer y = testing::RandomMono(8000, 41, 16000, 0.1);
  const AudioBuffer b = blocking_path(y, y);
  const GjbfOutput out = fdaf_gjbf(y, y, GjbfConfig{});
  const double blocked = testing::MaxAbs(b.channel(0));
  const double diff = testing::MaxAbsDiff(out.z.channel(0), out.y_f.channel(0));
  const double fixed_diff = testing::MaxAbsDiff(out.y_f.channel(0), y.channel(0));
  return {blocked == 0.0 && diff == 0.0 && fixed_diff == 0.0,
          Format("max |blocking| %.3g, max |z - y_f| %.3g, max |y_f - y| %.3g", blocked, diff,
                 fixed_diff)};
}

// Criterion 5: MPDR+BT beats GJBF+BT on average and both gain 6 dB.
Outcome BeamformerOrdering() {
  double mpdr_sum = 0.0, gjbf_sum = 0.0, mpdr_gain = 0.0, gjbf_gain = 0.0;
  double mpdr_min = 1e300, gjbf_min = 1e300;
  const int pairs = 10;
  for (int i = 0; i < pairs; ++i) {
    Scenario s = default_scenario();
    s.target.path = "synth:" + std::to_string(2 * i + 1);
    s.interferers.at(0).path = "synth:" + std::to_string(2 * i + 2);
    s.seed = static_cast<std::uint64_t>(i);
    const SimulatedScene scene = simulate_scenario(s);
    for (BeamformerKind kind : {BeamformerKind::kMpdr, BeamformerKind::kGjbf}) {
      PipelineConfig c;
      c.beamformer = kind;
      const ZoomResult r = run_zoom(scene.mixture, c);
      const EvalReport rep = evaluate(r, scene.target_image, scene.residual_image, c);
      if (kind == BeamformerKind::kMpdr) {
        mpdr_sum += rep.osinr_db;
        mpdr_gain += rep.sinr_gain_db;
        mpdr_min = std::min(mpdr_min, rep.sinr_gain_db);
      } else {
        gjbf_sum += rep.osinr_db;
        gjbf_gain += rep.sinr_gain_db;
        gjbf_min = std::min(gjbf_min, rep.sinr_gain_db);
      }
    }
  }
  const double n = pairs;
  const bool pass = mpdr_sum >= gjbf_sum && mpdr_gain / n >= 6.0 && gjbf_gain / n >= 6.0;
  return {pass, Format("mean OSINR MPDR+BT %.2f dB, GJBF+BT %.2f dB; mean gain %.2f / %.2f dB "
                       "(worst pair %.2f / %.2f dB)",
                       mpdr_sum / n, gjbf_sum / n, mpdr_gain / n, gjbf_gain / n, mpdr_min,
                       gjbf_min)};
}

// Criterion 6: attenuation values and contraction.
Outcome AttenuationAndContraction() {
  const double a0 = attenuation_factor(0.0), a1 = attenuation_factor(1.0);
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> frames(1, 40), size(0, 2);
  std::uniform_real_distribution<double> log_scale(-4.0, 2.0);
  std::size_t violations = 0, cells = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n_fft = std::size_t{64} << size(rng);
    const StftParams p{n_fft, n_fft / 2, WindowType::kSqrtHann};
    const std::size_t n_frames = static_cast<std::size_t>(frames(rng));
    TfMap sigma2(p.bins(), n_frames);
    TfMap power(p.bins(), n_frames);
    for (double& v : sigma2.values()) v = std::pow(10.0, log_scale(rng));
    for (double& v : power.values()) v = std::pow(10.0, log_scale(rng));
    const Spectrogram z = testing::NoiseSpectrogram(power, p, rng());
    const BlockThresholdResult r = apply_block_threshold(z, sigma2, BlockThresholdParams{});
    for (std::size_t i = 0; i < z.coefficients().size(); ++i) {
      ++cells;
      if (std::abs(r.output.coefficients()[i]) > std::abs(z.coefficients()[i])) ++violations;
    }
  }
  return {a0 == 0.0 && a1 == 0.5 && violations == 0,
          Format("a(0) = %g, a(1) = %g; %zu of %zu coefficients grew", a0, a1, violations, cells)};
}

// Criterion 7: tilings of an 8 x 16 macro-block with H = 4.
Outcome PartitionEnumeration() {
  const std::set<std::pair<std::size_t, std::size_t>> want = {
      {16, 1}, {8, 2}, {4, 4}, {2, 8}, {1, 16}};
  std::vector<Tiling> tilings;
  try {
    tilings = enumerate_partitions(8, 16, 4);
  } catch (const std::exception& e) {
    return {false, std::string("enumeration threw: ") + e.what()};
  }
  std::set<std::pair<std::size_t, std::size_t>> got;
  std::string shapes;
  bool exact = true;
  for (const Tiling& t : tilings) {
    got.insert({t.sub_frames, t.sub_bins});
    shapes += (shapes.empty() ? "" : ", ") + std::to_string(t.sub_frames) + "x" +
              std::to_string(t.sub_bins);
    std::vector<int> cover(8 * 16, 0);
    for (const TfRegion& b : t.blocks) {
      for (std::size_t f = b.frame0; f < b.frame0 + b.frames; ++f) {
        for (std::size_t k = b.bin0; k < b.bin0 + b.bins; ++k) {
          if (f < 8 && k < 16) {
            ++cover[f * 16 + k];
          } else {
            exact = false;
          }
        }
      }
    }
    exact = exact && std::all_of(cover.begin(), cover.end(), [](int c) { return c == 1; });
  }
  return {tilings.size() == 5 && got == want && exact,
          Format("%zu tilings (frames x bins): %s; exact cover %s; expected 5: 16x1, 8x2, 4x4, "
                 "2x8, 1x16",
                 tilings.size(), shapes.c_str(), exact ? "yes" : "no")};
}

// Criterion 8: stationary noise matched to its variance map is suppressed.
// Each trial draws a random level and a smooth random spectral colour of up
// to four decades, constant over time.
Outcome NoiseSuppression() {
  const StftParams p;
  const std::size_t bins = p.bins();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> level(-3.0, 1.0), coef(-0.5, 0.5),
      phase(0.0, 2.0 * std::numbers::pi);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const double base = level(rng);
    double c[4], ph[4];
    for (int m = 0; m < 4; ++m) {
      c[m] = coef(rng);
      ph[m] = phase(rng);
    }
    TfMap sigma2(bins, 64);
    for (std::size_t k = 0; k < bins; ++k) {
      double log_power = base;
      for (int m = 0; m < 4; ++m) {
        log_power += c[m] * std::cos(std::numbers::pi * (m + 1) * static_cast<double>(k) /
                                         static_cast<double>(bins - 1) +
                                     ph[m]);
      }
      for (std::size_t f = 0; f < sigma2.frames(); ++f) sigma2.at(k, f) = std::pow(10.0, log_power);
    }
    const Spectrogram z = testing::NoiseSpectrogram(sigma2, p, 100 + static_cast<std::uint64_t>(t));
    const BlockThresholdResult r = apply_block_threshold(z, sigma2, BlockThresholdParams{});
    double in = 0.0, out = 0.0;
    for (std::size_t i = 0; i < z.coefficients().size(); ++i) {
      in += std::norm(z.coefficients()[i]);
      out += std::norm(r.output.coefficients()[i]);
    }
    worst = std::max(worst, out / in);
  }
  return {worst <= 0.05, Format("worst output/input energy %.4f over 10 trials", worst)};
}

// Criterion 9: the selected length attains the curve maximum, and the curve
// is reproducible.
Outcome SweepContract() {
  Scenario s = default_scenario();
  s.synth_duration_s = 1.5;
  s.seed = 9;
  const SimulatedScene scene = simulate_scenario(s);
  const AudioBuffer ch1 = scene.mixture.extract(0), ch2 = scene.mixture.extract(1);
  const auto a = select_filter_length(ch1, ch2, kDefaultSweepLengths, GjbfConfig{});
  const auto b = select_filter_length(ch1, ch2, kDefaultSweepLengths, GjbfConfig{});
  const SimulatedScene again = simulate_scenario(s);
  const auto c = select_filter_length(again.mixture.extract(0), again.mixture.extract(1),
                                      kDefaultSweepLengths, GjbfConfig{});
  double best = -1e300;
  for (const auto& pt : a.curve) best = std::max(best, pt.mean_sinr_db);
  double at_selected = -1e300;
  for (const auto& pt : a.curve) {
    if (pt.length == a.best_length) at_selected = pt.mean_sinr_db;
  }
  auto same = [](const FilterLengthSelection& x, const FilterLengthSelection& y) {
    if (x.best_length != y.best_length || x.curve.size() != y.curve.size()) return false;
    for (std::size_t i = 0; i < x.curve.size(); ++i) {
      if (x.curve[i].length != y.curve[i].length ||
          x.curve[i].mean_sinr_db != y.curve[i].mean_sinr_db) {
        return false;
      }
    }
    return true;
  };
  const bool deterministic = same(a, b) && same(a, c);
  const bool complete = a.curve.size() == kDefaultSweepLengths.size() && a.warnings.empty();
  return {at_selected == best && deterministic && complete,
          Format("selected %zu at %.3f dB, curve max %.3f dB over %zu points; repeat runs %s",
                 a.best_length, at_selected, best, a.curve.size(),
                 deterministic ? "identical" : "differ")};
}

// Criterion 10: a target-only broadside scene leaves almost no residual
// variance.
Outcome ResidualVarianceSanity() {
  Scenario s = default_scenario();
  s.interferers.clear();
  const SimulatedScene scene = simulate_scenario(s);
  double worst_db = -1e300;
  std::string detail;
  for (BeamformerKind kind : {BeamformerKind::kMpdr, BeamformerKind::kGjbf}) {
    PipelineConfig c;
    c.beamformer = kind;
    const ZoomResult r = run_zoom(scene.mixture, c);
    double mean = 0.0;
    for (const cd& v : r.beamformed_spectrum.coefficients()) mean += std::norm(v);
    mean /= static_cast<double>(r.beamformed_spectrum.coefficients().size());
    const auto values = r.sigma2.values();
    const double peak = *std::max_element(values.begin(), values.end());
    const double db = peak > 0.0 ? 10.0 * std::log10(peak / mean) : -kDbCap;
    worst_db = std::max(worst_db, db);
    detail += Format("%s max sigma2 %.1f dB re mean |Z|^2; ",
                     std::string(beamformer_name(kind)).c_str(), db);
  }
  detail.resize(detail.size() - 2);
  return {worst_db <= -40.0, detail};
}

}  // namespace
}  // namespace azoom

int main() {
  using Check = std::function<azoom::Outcome()>;
  struct Criterion {
    int id;
    Check run;
    double budget_s;  // 0 for none
  };
  const std::vector<Criterion> criteria = {
      {1, azoom::StftReconstruction, 1.0},
      {2, azoom::MpdrDistortionlessAndOptimal, 10.0},
      {3, azoom::FdafMatchesBlockLms, 1.0},
      {4, azoom::BlockingInvariant, 0.0},
      {5, azoom::BeamformerOrdering, 120.0},
      {6, azoom::AttenuationAndContraction, 0.0},
      {7, azoom::PartitionEnumeration, 0.0},
      {8, azoom::NoiseSuppression, 0.0},
      {9, azoom::SweepContract, 0.0},
      {10, azoom::ResidualVarianceSanity, 0.0},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    azoom::Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::string timing = azoom::Format("%.2f s", secs);
    if (c.budget_s > 0.0) {
      timing += azoom::Format(" of %.0f s budget", c.budget_s);
      if (secs > c.budget_s) o.pass = false;
    }
    if (!o.pass) ++failures;
    std::printf("criterion %d: %s  %s [%s]\n", c.id, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
