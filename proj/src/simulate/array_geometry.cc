#include <cmath>
#include <numbers>

#include "audiozoom/error.h"
#include "audiozoom/simulate.h"

namespace azoom {

ArrayGeometry ArrayGeometry::two_mic(double spacing_m) {
  ArrayGeometry g;
  g.mic_positions = {{0.0, 0.0, 0.0}, {spacing_m, 0.0, 0.0}};
  g.validate();
  return g;
}

void ArrayGeometry::validate() const {
  if (mic_positions.size() < 2) throw Error("array needs at least 2 microphones");
  if (reference_index >= mic_positions.size()) {
    throw Error("reference microphone index out of range");
  }
  if (!(sound_speed > 0.0)) throw Error("sound speed must be positive");
  for (std::size_t i = 0; i < mic_positions.size(); ++i) {
    for (std::size_t j = i + 1; j < mic_positions.size(); ++j) {
      if (mic_positions[i] == mic_positions[j]) {
        throw Error("microphone positions must be distinct");
      }
    }
  }
}

std::vector<double> ArrayGeometry::delays(double azimuth_deg) const {
  validate();
  if (!(azimuth_deg >= 0.0 && azimuth_deg <= 180.0)) {
    throw Error("azimuth must be in [0, 180] degrees");
  }
  const double theta = azimuth_deg * std::numbers::pi / 180.0;
  // Unit vector pointing from the array towards the source (elevation 0).
  const double ux = std::cos(theta);
  const double uy = std::sin(theta);
  const auto& ref = mic_positions[reference_index];
  std::vector<double> tau(mic_positions.size());
  for (std::size_t m = 0; m < mic_positions.size(); ++m) {
    const double dx = mic_positions[m][0] - ref[0];
    const double dy = mic_positions[m][1] - ref[1];
    // A microphone further along u hears the wavefront earlier.
    tau[m] = -(dx * ux + dy * uy) / sound_speed;
  }
  return tau;
}

std::vector<std::complex<double>> steering_vector(const ArrayGeometry& geometry,
                                                  double azimuth_deg,
                                                  double frequency_hz) {
  if (frequency_hz < 0.0) throw Error("frequency must be nonnegative");
  const auto tau = geometry.delays(azimuth_deg);
  std::vector<std::complex<double>> d(tau.size());
  for (std::size_t m = 0; m < tau.size(); ++m) {
    d[m] = std::polar(1.0, -2.0 * std::numbers::pi * frequency_hz * tau[m]);
  }
  return d;
}

}  // namespace azoom
