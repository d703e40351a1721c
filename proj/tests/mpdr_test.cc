#include <gtest/gtest.h>

#include <random>

#include "audiozoom/mpdr.h"
#include "expect_error.h"
#include "test_util.h"

namespace azoom {
namespace {

using testing::cd;

const StftParams kParams{64, 32, WindowType::kSqrtHann};

Spectrogram RandomSpectrogram(std::size_t frames, std::uint64_t seed) {
  Spectrogram s(frames, kParams, 16000, 64 + 32 * (frames - 1));
  const auto v = testing::RandomComplex(frames * s.bins(), seed);
  std::size_t i = 0;
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t k = 0; k < s.bins(); ++k) s.at(k, f) = v[i++];
  }
  return s;
}

BinCovariance RandomPsd(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  BinCovariance c;
  // A A^H for a random 2x3 A is positive definite almost surely.
  cd a[2][3];
  for (auto& row : a) {
    for (auto& v : row) v = {g(rng), g(rng)};
  }
  for (int r = 0; r < 2; ++r) {
    for (int col = 0; col < 2; ++col) {
      cd s = 0.0;
      for (int k = 0; k < 3; ++k) s += a[r][k] * std::conj(a[col][k]);
      c.matrix[static_cast<std::size_t>(r * 2 + col)] = s;
    }
  }
  c.frame_count = 3;
  return c;
}

cd Gain(const Complex2& w, const Complex2& d) {
  return std::conj(w[0]) * d[0] + std::conj(w[1]) * d[1];
}

double OutputPower(const Complex2& w, const BinCovariance& c) {
  cd s = 0.0;
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t col = 0; col < 2; ++col) s += std::conj(w[r]) * c(r, col) * w[col];
  }
  return s.real();
}

TEST(Covariance, MatchesDirectSum) {
  const Spectrogram a = RandomSpectrogram(7, 1);
  const Spectrogram b = RandomSpectrogram(7, 2);
  const auto cov = estimate_covariance(a, b);
  ASSERT_EQ(cov.size(), a.bins());
  for (std::size_t k : {0u, 5u, 32u}) {
    cd r11 = 0.0, r12 = 0.0, r21 = 0.0, r22 = 0.0;
    for (std::size_t f = 0; f < 7; ++f) {
      r11 += a.at(k, f) * std::conj(a.at(k, f));
      r12 += a.at(k, f) * std::conj(b.at(k, f));
      r21 += b.at(k, f) * std::conj(a.at(k, f));
      r22 += b.at(k, f) * std::conj(b.at(k, f));
    }
    EXPECT_NEAR(std::abs(cov[k](0, 0) - r11 / 7.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(cov[k](0, 1) - r12 / 7.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(cov[k](1, 0) - r21 / 7.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(cov[k](1, 1) - r22 / 7.0), 0.0, 1e-12);
    EXPECT_EQ(cov[k].frame_count, 7u);
    EXPECT_EQ(cov[k].frequency_bin, k);
  }
}

TEST(Covariance, Errors) {
  EXPECT_ERROR_CONTAINS(estimate_covariance(RandomSpectrogram(3, 1), RandomSpectrogram(4, 2)),
                        "dimensions differ");
}

TEST(MpdrWeights, MatchesExplicitInverse) {
  std::mt19937_64 rng(4);
  const BinCovariance c = RandomPsd(rng);
  const Complex2 d{cd(1.0, 0.0), std::polar(1.0, 0.7)};
  const double alpha = 0.3;
  // (R + alpha I)^-1 by the adjugate formula.
  const cd a = c(0, 0) + alpha, b = c(0, 1), cc = c(1, 0), dd = c(1, 1) + alpha;
  const cd det = a * dd - b * cc;
  const cd u0 = (dd * d[0] - b * d[1]) / det;
  const cd u1 = (-cc * d[0] + a * d[1]) / det;
  const cd den = std::conj(d[0]) * u0 + std::conj(d[1]) * u1;
  const Complex2 w = mpdr_weights(c, d, alpha);
  EXPECT_NEAR(std::abs(w[0] - u0 / den), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(w[1] - u1 / den), 0.0, 1e-12);
}

TEST(MpdrWeights, DistortionlessAndMinimumPower) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const BinCovariance c = RandomPsd(rng);
    const Complex2 d{cd(1.0, 0.0), std::polar(1.0, g(rng))};
    const Complex2 w = mpdr_weights(c, d, 0.0);
    EXPECT_NEAR(std::abs(Gain(w, d) - 1.0), 0.0, 1e-12);
    const double p = OutputPower(w, c);
    for (int i = 0; i < 100; ++i) {
      Complex2 v{cd(g(rng), g(rng)), cd(g(rng), g(rng))};
      const cd s = Gain(v, d);
      v[0] /= std::conj(s);
      v[1] /= std::conj(s);
      EXPECT_GE(OutputPower(v, c), p * (1.0 - 1e-12));
    }
  }
}

TEST(MpdrWeights, DegenerateCovarianceThrows) {
  BinCovariance c;
  c.matrix = {cd(1.0), cd(1.0), cd(1.0), cd(1.0)};
  // Rank one and unloaded: singular.
  EXPECT_ERROR_CONTAINS(mpdr_weights(c, {cd(1.0), cd(1.0)}, 0.0), "degenerate covariance");
  EXPECT_ERROR_CONTAINS(mpdr_weights(c, {cd(1.0), cd(1.0)}, -1.0), "nonnegative");
}

TEST(DesignMpdr, SilentBinsFallBackToSteering) {
  std::vector<BinCovariance> covs(3);
  for (std::size_t k = 0; k < 3; ++k) covs[k].frequency_bin = k;
  const auto design = design_mpdr(covs, broadside_steering(3));
  for (const auto& w : design.weights) {
    EXPECT_NEAR(std::abs(w[0] - 0.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(w[1] - 0.5), 0.0, 1e-15);
  }
  EXPECT_ERROR_CONTAINS(design_mpdr(covs, broadside_steering(2)), "bin counts differ");
}

TEST(DesignMpdr, LoadingScalesWithTrace) {
  std::mt19937_64 rng(2);
  std::vector<BinCovariance> covs = {RandomPsd(rng)};
  const auto design = design_mpdr(covs, broadside_steering(1), {0.1});
  EXPECT_NEAR(design.loading[0], 0.1 * covs[0].trace() / 2.0, 1e-15);
  EXPECT_NEAR(std::abs(Gain(design.weights[0], design.steering[0]) - 1.0), 0.0, 1e-12);
}

TEST(DesignMpdr, NullsAPlaneWaveInterferer) {
  // Interferer alone in the data: MPDR with light loading should suppress it
  // while passing the broadside target.
  const ArrayGeometry geom = ArrayGeometry::two_mic(0.10);
  const std::size_t k = 16;
  const double freq = 16000.0 * static_cast<double>(k) / 64.0;
  const auto di = steering_vector(geom, 30.0, freq);
  BinCovariance c;
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t col = 0; col < 2; ++col) c.matrix[r * 2 + col] = di[r] * std::conj(di[col]);
  }
  c.matrix[0] += 1e-6;
  c.matrix[3] += 1e-6;
  const Complex2 d{cd(1.0), cd(1.0)};
  const Complex2 w = mpdr_weights(c, d, 0.0);
  EXPECT_NEAR(std::abs(Gain(w, d) - 1.0), 0.0, 1e-9);
  EXPECT_LT(std::abs(Gain(w, {di[0], di[1]})), 1e-2);
}

TEST(SteeringForBins, BroadsideIsAllOnes) {
  const auto s = steering_for_bins(ArrayGeometry::two_mic(), 90.0, kParams, 16000);
  ASSERT_EQ(s.size(), 33u);
  for (const auto& d : s) EXPECT_NEAR(std::abs(d[1] - 1.0), 0.0, 1e-12);
}

TEST(ApplyMpdr, ComputesHermitianProduct) {
  const Spectrogram a = RandomSpectrogram(4, 5);
  const Spectrogram b = RandomSpectrogram(4, 6);
  MpdrWeights w;
  const auto r = testing::RandomComplex(2 * a.bins(), 7);
  for (std::size_t k = 0; k < a.bins(); ++k) w.weights.push_back({r[2 * k], r[2 * k + 1]});
  const Spectrogram z = apply_mpdr(a, b, w);
  for (std::size_t f = 0; f < 4; ++f) {
    for (std::size_t k = 0; k < a.bins(); ++k) {
      const cd want = std::conj(w.weights[k][0]) * a.at(k, f) +
                      std::conj(w.weights[k][1]) * b.at(k, f);
      EXPECT_NEAR(std::abs(z.at(k, f) - want), 0.0, 1e-12);
    }
  }
  w.weights.pop_back();
  EXPECT_ERROR_CONTAINS(apply_mpdr(a, b, w), "weight count");
}

}  // namespace
}  // namespace azoom
