#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "audiozoom/error.h"
#include "audiozoom/simulate.h"

namespace azoom {
namespace {

// Image of a mono source at every microphone, with echo taps.
AudioBuffer SourceImage(const AudioBuffer& source, double azimuth_deg,
                        const ArrayGeometry& geometry,
                        const std::vector<EchoTap>& echoes) {
  const auto tau = geometry.delays(azimuth_deg);
  std::vector<std::vector<double>> channels;
  channels.reserve(tau.size());
  for (double t : tau) {
    AudioBuffer direct = fractional_delay(source, t);
    for (const EchoTap& tap : echoes) {
      const AudioBuffer echo = fractional_delay(source, t + tap.delay_s);
      auto dst = direct.channel(0);
      auto src = echo.channel(0);
      for (std::size_t n = 0; n < dst.size(); ++n) dst[n] += tap.gain * src[n];
    }
    auto c = direct.channel(0);
    channels.emplace_back(c.begin(), c.end());
  }
  return AudioBuffer(std::move(channels), source.sample_rate());
}

AudioBuffer Cropped(const AudioBuffer& signal, std::size_t length) {
  AudioBuffer out = signal;
  out.truncate(length);
  return out;
}

}  // namespace

std::vector<EchoTap> exponential_echo_taps(double t60_s, std::uint64_t seed,
                                           std::size_t count) {
  if (!(t60_s > 0.002)) throw Error("echo T60 must exceed 2 ms");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> when(0.002, t60_s);
  std::bernoulli_distribution flip(0.5);
  std::vector<EchoTap> taps(count);
  for (auto& tap : taps) {
    tap.delay_s = when(rng);
    // -60 dB at t60
    tap.gain = 0.6 * std::pow(10.0, -3.0 * tap.delay_s / t60_s);
    if (flip(rng)) tap.gain = -tap.gain;
  }
  std::sort(taps.begin(), taps.end(),
            [](const EchoTap& a, const EchoTap& b) { return a.delay_s < b.delay_s; });
  return taps;
}

double power_ratio_db(const AudioBuffer& numerator,
                      const AudioBuffer& denominator) {
  const double den = mean_power(denominator);
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(mean_power(numerator) / den);
}

SimulatedScene synthesize_mixture(const MixtureSpec& spec,
                                  const ArrayGeometry& geometry,
                                  std::uint64_t seed) {
  geometry.validate();
  const AudioBuffer& target = spec.target.signal;
  if (target.channel_count() != 1) throw Error("target must be a mono signal");
  if (target.frames() == 0) throw Error("target signal is empty");
  if (!std::isfinite(spec.sir_db)) throw Error("SIR must be finite");
  const int rate = target.sample_rate();
  std::size_t length = target.frames();
  for (const auto& src : spec.interferers) {
    if (src.signal.channel_count() != 1) {
      throw Error("interferer must be a mono signal");
    }
    if (src.signal.sample_rate() != rate) throw Error("sample rate mismatch");
    length = std::min(length, src.signal.frames());
  }
  if (length == 0) throw Error("interferer signal is empty");
  const std::size_t mics = geometry.mic_count();

  SimulatedScene scene;
  scene.target_image = SourceImage(Cropped(target, length), spec.target.azimuth_deg,
                                   geometry, spec.echo_taps);
  scene.interference_image = AudioBuffer(mics, length, rate);
  for (const auto& src : spec.interferers) {
    scene.interferer_images.push_back(SourceImage(
        Cropped(src.signal, length), src.azimuth_deg, geometry, spec.echo_taps));
  }

  if (!scene.interferer_images.empty()) {
    AudioBuffer summed(mics, length, rate);
    for (const auto& img : scene.interferer_images) summed = add(summed, img);
    const double p_target = mean_power(scene.target_image);
    const double p_interf = mean_power(summed);
    if (p_interf == 0.0) throw Error("interferers have zero power");
    const double gain =
        std::sqrt(p_target / (p_interf * std::pow(10.0, spec.sir_db / 10.0)));
    for (auto& img : scene.interferer_images) img = scaled(img, gain);
    for (const auto& img : scene.interferer_images) {
      scene.interference_image = add(scene.interference_image, img);
    }
  }

  scene.noise_image = AudioBuffer(mics, length, rate);
  if (spec.sensor_noise_snr_db) {
    const double p_signal =
        mean_power(add(scene.target_image, scene.interference_image));
    const double sigma =
        std::sqrt(p_signal / std::pow(10.0, *spec.sensor_noise_snr_db / 10.0));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    for (std::size_t c = 0; c < mics; ++c) {
      for (double& v : scene.noise_image.channel(c)) v = gauss(rng);
    }
  }

  scene.residual_image = add(scene.interference_image, scene.noise_image);
  scene.mixture = add(scene.target_image, scene.residual_image);
  scene.realized_sir_db =
      scene.interferer_images.empty()
          ? std::numeric_limits<double>::infinity()
          : power_ratio_db(scene.target_image, scene.interference_image);
  return scene;
}

}  // namespace azoom
