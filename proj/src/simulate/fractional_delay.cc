#include <cmath>
#include <numbers>
#include <vector>

#include "audiozoom/error.h"
#include "audiozoom/simulate.h"

namespace azoom {
namespace {

// Interpolator taps h_k = sinc(k - frac) * kaiser((k - frac) / radius),
// for the k with |k - frac| < radius. Returns the first k.
long FractionalTaps(double frac, double radius, double beta,
                    std::vector<double>* taps) {
  const long first = static_cast<long>(std::floor(frac - radius)) + 1;
  const long last = static_cast<long>(std::ceil(frac + radius)) - 1;
  const double norm = std::cyl_bessel_i(0.0, beta);
  const double sin_pf = std::sin(std::numbers::pi * frac);
  taps->clear();
  for (long k = first; k <= last; ++k) {
    const double t = static_cast<double>(k) - frac;
    const double u = t / radius;
    const double window = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - u * u))) / norm;
    // sin(pi (k - f)) = (-1)^(k+1) sin(pi f), exact zeros at integer offsets.
    const double sign = (k % 2 == 0) ? -1.0 : 1.0;
    const double sinc = sign * sin_pf / (std::numbers::pi * t);
    taps->push_back(sinc * window);
  }
  return first;
}

void DelayChannel(std::span<const double> in, std::span<double> out,
                  double delay_samples, const FractionalDelayOptions& options) {
  const long n = static_cast<long>(in.size());
  const double whole = std::floor(delay_samples);
  const double frac = delay_samples - whole;
  const long shift = static_cast<long>(whole);
  if (frac == 0.0) {
    for (long i = 0; i < n; ++i) {
      const long src = i - shift;
      out[i] = (src >= 0 && src < n) ? in[src] : 0.0;
    }
    return;
  }
  std::vector<double> taps;
  const double radius = (options.taps + 1) / 2.0;
  const long first = FractionalTaps(frac, radius, options.kaiser_beta, &taps);
  const long count = static_cast<long>(taps.size());
  // y[i] = sum_k h_k x[i - shift - k]
  for (long i = 0; i < n; ++i) {
    double acc = 0.0;
    const long base = i - shift - first;
    for (long j = 0; j < count; ++j) {
      const long src = base - j;
      if (src >= 0 && src < n) acc += taps[j] * in[src];
    }
    out[i] = acc;
  }
}

}  // namespace

AudioBuffer fractional_delay(const AudioBuffer& signal, double delay_s,
                             const FractionalDelayOptions& options) {
  if (options.taps < 1) throw Error("interpolator needs at least one tap");
  if (!(std::abs(delay_s) < signal.duration_s())) {
    throw Error("delay exceeds signal length");
  }
  AudioBuffer out(signal.channel_count(), signal.frames(), signal.sample_rate());
  double delay_samples = delay_s * signal.sample_rate();
  // Seconds-to-samples conversion leaves rounding noise on integer delays.
  if (std::abs(delay_samples - std::round(delay_samples)) < 1e-9) {
    delay_samples = std::round(delay_samples);
  }
  for (std::size_t c = 0; c < signal.channel_count(); ++c) {
    DelayChannel(signal.channel(c), out.channel(c), delay_samples, options);
  }
  return out;
}

}  // namespace azoom
