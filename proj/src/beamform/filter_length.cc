#include <algorithm>
#include <cmath>
#include <exception>
#include <future>
#include <limits>

#include "audiozoom/block_threshold.h"
#include "audiozoom/error.h"
#include "audiozoom/gjbf.h"

namespace azoom {
namespace {

bool Floored(double sigma2, double floor) {
  return sigma2 < floor || sigma2 <= 0.0;
}

}  // namespace

TfMap sinr_map(const Spectrogram& z, const TfMap& sigma2) {
  if (!z.same_shape(sigma2)) throw Error("variance map dimensions differ");
  const double floor = variance_floor(z);
  TfMap out(z.bins(), z.frames());
  const auto c = z.coefficients();
  const auto s = sigma2.values();
  auto o = out.values();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (Floored(s[i], floor)) {
      o[i] = kSinrSentinel;
    } else {
      o[i] = std::max((std::norm(c[i]) - s[i]) / s[i], 0.0);
    }
  }
  return out;
}

double mean_sinr_db(const Spectrogram& z, const TfMap& sigma2) {
  const TfMap sinr = sinr_map(z, sigma2);
  const double floor = variance_floor(z);
  const auto s = sigma2.values();
  const auto r = sinr.values();
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (Floored(s[i], floor)) continue;
    sum += 10.0 * std::log10(1.0 + r[i]);
    ++count;
  }
  if (count == 0) return std::numeric_limits<double>::infinity();
  return sum / static_cast<double>(count);
}

FilterLengthSelection select_filter_length(const AudioBuffer& ch1,
                                           const AudioBuffer& ch2,
                                           const std::vector<std::size_t>& candidates,
                                           const GjbfConfig& config_template,
                                           const StftParams& stft_params) {
  std::vector<std::size_t> lengths = candidates;
  std::sort(lengths.begin(), lengths.end());
  lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());
  if (lengths.size() < 2) throw Error("at least two candidate lengths required");
  stft_params.validate();

  const Spectrogram y1 = stft_padded(ch1, stft_params);
  const Spectrogram y2 = stft_padded(ch2, stft_params);

  auto score = [&](std::size_t length) {
    GjbfConfig config = config_template;
    config.filter_length = length;
    config.record_trajectory = false;
    const GjbfOutput out = fdaf_gjbf(ch1, ch2, config);
    const Spectrogram z = stft_padded(out.z, stft_params);
    return mean_sinr_db(z, residual_variance(y1, y2, z));
  };

  // Candidates are independent runs; each owns its filter state.
  std::vector<std::future<double>> runs;
  runs.reserve(lengths.size());
  for (std::size_t length : lengths) {
    runs.push_back(std::async(std::launch::async, score, length));
  }

  FilterLengthSelection selection;
  std::exception_ptr first_error;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    try {
      selection.curve.push_back({lengths[i], runs[i].get()});
    } catch (const std::exception& e) {
      if (!first_error) first_error = std::current_exception();
      selection.warnings.push_back("length " + std::to_string(lengths[i]) +
                                   " skipped: " + e.what());
    }
  }
  if (selection.curve.empty()) std::rethrow_exception(first_error);

  // Ascending order plus strict comparison keeps ties on the smaller length.
  const FilterLengthPoint* best = &selection.curve.front();
  for (const auto& p : selection.curve) {
    if (p.mean_sinr_db > best->mean_sinr_db) best = &p;
  }
  selection.best_length = best->length;
  return selection;
}

}  // namespace azoom
