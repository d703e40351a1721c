#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "audiozoom/block_threshold.h"
#include "audiozoom/fft.h"
#include "audiozoom/gjbf.h"
#include "audiozoom/simulate.h"
#include "expect_error.h"
#include "test_util.h"

namespace azoom {
namespace {

AudioBuffer Mono(std::vector<double> v) { return AudioBuffer::mono(std::move(v), 16000); }

double Power(std::span<const double> x, std::size_t from, std::size_t to) {
  double s = 0.0;
  for (std::size_t n = from; n < to; ++n) s += x[n] * x[n];
  return s / static_cast<double>(to - from);
}

// y1 = i(n), y2 = 0.5 i(n - 3): an interferer the adaptive path can cancel
// with a short, quickly decaying filter.
std::pair<AudioBuffer, AudioBuffer> EchoedInterferer(std::size_t n, std::uint64_t seed) {
  const auto i = testing::RandomSignal(n, seed, 0.1);
  std::vector<double> y2(n, 0.0);
  for (std::size_t t = 3; t < n; ++t) y2[t] = 0.5 * i[t - 3];
  return {Mono(i), Mono(y2)};
}

TEST(Paths, FixedAndBlockingExamples) {
  const AudioBuffer a = Mono({1.0, 2.0, -3.0});
  const AudioBuffer b = Mono({3.0, 2.0, 1.0});
  const AudioBuffer f = fixed_path(a, b);
  const AudioBuffer d = blocking_path(a, b);
  EXPECT_EQ(std::vector<double>(f.channel(0).begin(), f.channel(0).end()),
            (std::vector<double>{2.0, 2.0, -1.0}));
  EXPECT_EQ(std::vector<double>(d.channel(0).begin(), d.channel(0).end()),
            (std::vector<double>{-2.0, 0.0, -4.0}));
  EXPECT_ERROR_CONTAINS(fixed_path(a, Mono({1.0})), "length mismatch");
}

TEST(Paths, BroadsideTargetIsBlockedExactly) {
  MixtureSpec spec;
  spec.target = {90.0, synthesize_speech_like(3, {0.5, 16000, 0.1}), SourceRole::kTarget};
  const auto scene = synthesize_mixture(spec, ArrayGeometry::two_mic(), 0);
  const AudioBuffer x =
      blocking_path(scene.target_image.extract(0), scene.target_image.extract(1));
  EXPECT_EQ(testing::MaxAbs(x.channel(0)), 0.0);
}

TEST(Config, Validation) {
  GjbfConfig c;
  EXPECT_EQ(c.block(), 250u);
  EXPECT_EQ(c.delay(), 125u);
  EXPECT_EQ(c.fft_size(), 500u);
  c.step_size = 0.0;
  EXPECT_ERROR_CONTAINS(c.validate(), "step size");
  c = GjbfConfig{};
  c.filter_length = 0;
  EXPECT_ERROR_CONTAINS(c.validate(), "filter length");
  c = GjbfConfig{};
  c.leak = 1.5;
  EXPECT_ERROR_CONTAINS(c.validate(), "leak");
}

TEST(Fdaf, MatchesTimeDomainBlockLms) {
  const std::size_t len = 76, taps = 8, block = 8, delay = 4;
  const double mu = 0.01;
  const auto y1 = testing::RandomSignal(len, 21);
  const auto y2 = testing::RandomSignal(len, 22);

  // Reference streams: x is the blocking path, d the fixed path delayed by D.
  const std::size_t blocks = (len + delay + block - 1) / block;
  std::vector<double> x(blocks * block, 0.0), d(blocks * block, 0.0);
  for (std::size_t n = 0; n < len; ++n) {
    x[n] = y1[n] - y2[n];
    d[n + delay] = 0.5 * (y1[n] + y2[n]);
  }
  const auto history = testing::BlockLms(x, d, taps, block, mu);
  ASSERT_EQ(history.size(), 10u);

  GjbfConfig cfg;
  cfg.filter_length = taps;
  cfg.block_size = block;
  cfg.alignment_delay = delay;
  cfg.step_size = mu;
  cfg.normalized = false;
  cfg.record_trajectory = true;
  const GjbfOutput out = fdaf_gjbf(Mono(y1), Mono(y2), cfg);
  ASSERT_TRUE(out.trajectory.has_value());
  ASSERT_EQ(out.trajectory->weights.size(), 10u);

  RealFft fft(taps + block);
  std::vector<double> w(taps + block);
  for (std::size_t j = 1; j < 10; ++j) {
    fft.inverse(out.trajectory->weights[j], w);
    const auto& want = history[j - 1];
    const double scale = testing::MaxAbs(want);
    for (std::size_t i = 0; i < taps; ++i) {
      EXPECT_NEAR(w[i], want[i], 1e-6 * scale) << "block " << j << " tap " << i;
    }
    for (std::size_t i = taps; i < taps + block; ++i) EXPECT_NEAR(w[i], 0.0, 1e-12);
  }
  const double scale = testing::MaxAbs(history.back());
  for (std::size_t i = 0; i < taps; ++i) {
    EXPECT_NEAR(out.final_state.taps[i], history.back()[i], 1e-6 * scale);
  }

  // Output oracle: z(n) = d(n + D) - sum_i w_i x(n + D - i) with the taps in
  // force for the block containing n + D.
  const auto z = out.z.channel(0);
  for (std::size_t n = 0; n < len; ++n) {
    const std::size_t m = n + delay;
    const std::size_t j = m / block;
    double y = 0.0;
    if (j > 0) {
      for (std::size_t i = 0; i < taps && i <= m; ++i) y += history[j - 1][i] * x[m - i];
    }
    EXPECT_NEAR(z[n], d[m] - y, 1e-9) << n;
  }
}

TEST(Fdaf, OutputsDecomposeAsFixedMinusAdaptive) {
  const auto [a, b] = EchoedInterferer(4000, 3);
  GjbfConfig cfg;
  cfg.filter_length = 32;
  const GjbfOutput out = fdaf_gjbf(a, b, cfg);
  for (std::size_t n = 0; n < 4000; ++n) {
    EXPECT_NEAR(out.z.channel(0)[n], out.y_f.channel(0)[n] - out.y_b.channel(0)[n], 1e-12);
  }
  EXPECT_EQ(out.final_state.taps.size(), 32u);
  EXPECT_EQ(out.final_state.input_history.size(), 32u);
  EXPECT_EQ(out.final_state.blocks_processed, (4000u + 16u + 31u) / 32u);
}

TEST(Fdaf, CancelsCoherentWhiteInterferer) {
  const std::size_t n = 32000;
  const auto [a, b] = EchoedInterferer(n, 5);
  GjbfConfig cfg;
  cfg.filter_length = 32;
  cfg.step_size = 0.2;
  const GjbfOutput out = fdaf_gjbf(a, b, cfg);
  const double before = Power(out.y_f.channel(0), n / 2, n);
  const double after = Power(out.z.channel(0), n / 2, n);
  EXPECT_GT(10.0 * std::log10(before / after), 10.0);
  // Error power falls as the filter adapts.
  EXPECT_LT(Power(out.z.channel(0), 3 * n / 4, n), Power(out.z.channel(0), 0, n / 16));
}

TEST(Fdaf, UnconstrainedAlsoConverges) {
  const std::size_t n = 32000;
  const auto [a, b] = EchoedInterferer(n, 6);
  GjbfConfig cfg;
  cfg.filter_length = 32;
  cfg.step_size = 0.2;
  cfg.constrained = false;
  const GjbfOutput out = fdaf_gjbf(a, b, cfg);
  const double before = Power(out.y_f.channel(0), n / 2, n);
  const double after = Power(out.z.channel(0), n / 2, n);
  EXPECT_GT(10.0 * std::log10(before / after), 10.0);
}

TEST(Fdaf, TargetOnlyInputPassesThroughFixedPath) {
  const AudioBuffer s = testing::RandomMono(3000, 8);
  GjbfConfig cfg;
  cfg.filter_length = 16;
  const GjbfOutput out = fdaf_gjbf(s, s, cfg);
  EXPECT_LE(testing::MaxAbsDiff(out.z.channel(0), s.channel(0)), 1e-12);
  EXPECT_EQ(testing::MaxAbs(out.final_state.taps), 0.0);
}

TEST(Fdaf, DivergenceIsReported) {
  const auto [a, b] = EchoedInterferer(4000, 7);
  GjbfConfig cfg;
  cfg.filter_length = 32;
  cfg.step_size = 1.9;
  cfg.normalized = false;
  EXPECT_ERROR_CONTAINS(fdaf_gjbf(scaled(a, 100.0), scaled(b, 100.0), cfg),
                        "step size too large");
}

TEST(Fdaf, SilentBlockingLeadInDoesNotDiverge) {
  // The target plays alone for a while, then a faint interferer starts. The
  // first blocks with a nonzero blocking path must not blow up the taps.
  const std::size_t n = 8000;
  auto t = testing::RandomSignal(n, 11, 0.1);
  auto i = testing::RandomSignal(n, 12, 1e-8);
  std::vector<double> y1(t), y2(t);
  for (std::size_t k = 3000; k < n; ++k) {
    y1[k] += i[k];
    y2[k] += 0.5 * i[k - 3];
  }
  GjbfConfig cfg;
  cfg.filter_length = 16;
  const GjbfOutput out = fdaf_gjbf(Mono(y1), Mono(y2), cfg);
  EXPECT_LT(testing::MaxAbs(out.final_state.taps), 10.0);
  cfg.fixed_power_floor = -1.0;
  EXPECT_ERROR_CONTAINS(cfg.validate(), "fixed power floor");
}

TEST(Fdaf, InputChecks) {
  GjbfConfig cfg;
  cfg.filter_length = 50;
  const AudioBuffer s = testing::RandomMono(100, 1);
  EXPECT_ERROR_CONTAINS(fdaf_gjbf(s, s, cfg), "longer than twice the filter length");
  EXPECT_ERROR_CONTAINS(fdaf_gjbf(s, testing::RandomMono(101, 1), cfg), "length mismatch");
  EXPECT_ERROR_CONTAINS(fdaf_gjbf(s, AudioBuffer(2, 100, 16000), cfg), "mono");
}

TEST(Replay, ReproducesAdaptiveRunAndIsLinear) {
  const auto [a, b] = EchoedInterferer(5000, 9);
  const AudioBuffer t = testing::RandomMono(5000, 10, 16000, 0.1);
  const AudioBuffer y1 = add(a, t), y2 = add(b, t);
  GjbfConfig cfg;
  cfg.filter_length = 64;
  cfg.record_trajectory = true;
  const GjbfOutput out = fdaf_gjbf(y1, y2, cfg);
  const AudioBuffer z = replay_gjbf(*out.trajectory, y1, y2);
  EXPECT_LE(testing::MaxAbsDiff(z.channel(0), out.z.channel(0)), 1e-12);

  const AudioBuffer zt = replay_gjbf(*out.trajectory, t, t);
  const AudioBuffer zi = replay_gjbf(*out.trajectory, a, b);
  const AudioBuffer sum = add(zt, zi);
  EXPECT_LE(testing::MaxAbsDiff(sum.channel(0), z.channel(0)), 1e-12);
  // The target is identical on both microphones, so it bypasses the filter.
  EXPECT_LE(testing::MaxAbsDiff(zt.channel(0), t.channel(0)), 1e-12);

  EXPECT_ERROR_CONTAINS(replay_gjbf(*out.trajectory, testing::RandomMono(10, 1),
                                    testing::RandomMono(10, 2)),
                        "length differs");
}

TEST(SinrMap, Examples) {
  const StftParams p{4, 2, WindowType::kSqrtHann};
  Spectrogram z(2, p, 16000, 6);
  TfMap s2(3, 2, 1.0);
  z.at(0, 0) = {2.0, 0.0};  // |Z|^2 = 4, sigma^2 = 1 -> 3
  z.at(1, 0) = {0.5, 0.5};  // |Z|^2 = 0.5 -> floored at 0
  z.at(2, 0) = {1.0, 0.0};  // exactly the variance -> 0
  s2.at(0, 1) = 0.0;        // no residual -> sentinel
  const TfMap r = sinr_map(z, s2);
  EXPECT_DOUBLE_EQ(r.at(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(r.at(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(r.at(2, 0), 0.0);
  EXPECT_DOUBLE_EQ(r.at(0, 1), kSinrSentinel);
  // Floored coefficients do not enter the mean; five remain, one at 3.
  EXPECT_NEAR(mean_sinr_db(z, s2), 10.0 * std::log10(4.0) / 5.0, 1e-12);
  EXPECT_ERROR_CONTAINS(sinr_map(z, TfMap(3, 3)), "dimensions differ");
}

TEST(SinrMap, AllFlooredIsInfinite) {
  const StftParams p{4, 2, WindowType::kSqrtHann};
  Spectrogram z(1, p, 16000, 4);
  z.at(1, 0) = 1.0;
  EXPECT_TRUE(std::isinf(mean_sinr_db(z, TfMap(3, 1, 0.0))));
}

class SweepTest : public ::testing::Test {
 protected:
  void SetUp() override {
    MixtureSpec spec;
    spec.target = {90.0, synthesize_speech_like(1, {0.5, 16000, 0.1}), SourceRole::kTarget};
    spec.interferers.push_back(
        {60.0, synthesize_speech_like(2, {0.5, 16000, 0.1}), SourceRole::kInterference});
    scene_ = synthesize_mixture(spec, ArrayGeometry::two_mic(), 0);
    ch1_ = scene_.mixture.extract(0);
    ch2_ = scene_.mixture.extract(1);
  }

  double Score(std::size_t length) const {
    GjbfConfig cfg;
    cfg.filter_length = length;
    const StftParams p;
    const GjbfOutput out = fdaf_gjbf(ch1_, ch2_, cfg);
    const Spectrogram z = stft_padded(out.z, p);
    return mean_sinr_db(z, residual_variance(stft_padded(ch1_, p), stft_padded(ch2_, p), z));
  }

  SimulatedScene scene_;
  AudioBuffer ch1_, ch2_;
};

TEST_F(SweepTest, CurveAndArgmax) {
  const std::vector<std::size_t> lengths = {64, 16, 32, 16, 128};
  const auto sel = select_filter_length(ch1_, ch2_, lengths, GjbfConfig{});
  ASSERT_EQ(sel.curve.size(), 4u);
  EXPECT_TRUE(sel.warnings.empty());
  std::size_t best = 0;
  double best_score = -1e300;
  for (std::size_t i = 0; i < sel.curve.size(); ++i) {
    if (i > 0) {
      EXPECT_LT(sel.curve[i - 1].length, sel.curve[i].length);
    }
    EXPECT_EQ(sel.curve[i].mean_sinr_db, Score(sel.curve[i].length));
    if (sel.curve[i].mean_sinr_db > best_score) {
      best_score = sel.curve[i].mean_sinr_db;
      best = sel.curve[i].length;
    }
  }
  EXPECT_EQ(sel.best_length, best);
}

TEST_F(SweepTest, PermutationInvariantAndDeterministic) {
  const auto a = select_filter_length(ch1_, ch2_, {16, 48, 96}, GjbfConfig{});
  const auto b = select_filter_length(ch1_, ch2_, {96, 16, 48}, GjbfConfig{});
  EXPECT_EQ(a.best_length, b.best_length);
  ASSERT_EQ(a.curve.size(), b.curve.size());
  for (std::size_t i = 0; i < a.curve.size(); ++i) {
    EXPECT_EQ(a.curve[i].mean_sinr_db, b.curve[i].mean_sinr_db);
  }
}

TEST_F(SweepTest, FailingCandidatesBecomeWarnings) {
  const auto sel = select_filter_length(ch1_, ch2_, {16, 32, 6000}, GjbfConfig{});
  EXPECT_EQ(sel.curve.size(), 2u);
  ASSERT_EQ(sel.warnings.size(), 1u);
  EXPECT_NE(sel.warnings[0].find("6000"), std::string::npos);
  EXPECT_ERROR_CONTAINS(select_filter_length(ch1_, ch2_, {5000, 6000}, GjbfConfig{}),
                        "twice the filter length");
  EXPECT_ERROR_CONTAINS(select_filter_length(ch1_, ch2_, {16, 16}, GjbfConfig{}),
                        "at least two");
}

}  // namespace
}  // namespace azoom
