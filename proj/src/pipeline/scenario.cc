#include <charconv>
#include <cmath>
#include <fstream>

#include "audiozoom/error.h"
#include "audiozoom/pipeline.h"
#include "audiozoom/wav_io.h"

namespace azoom {
namespace {

std::string Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double ParseDouble(const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw Error("expected a number, got '" + text + "'");
  }
  return v;
}

std::uint64_t ParseUnsigned(const std::string& text) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error("expected a nonnegative integer, got '" + text + "'");
  }
  return v;
}

ScenarioSource ParseSource(const std::string& value) {
  const auto comma = value.rfind(',');
  if (comma == std::string::npos) throw Error("expected 'path,azimuth'");
  ScenarioSource src;
  src.path = Trim(std::string_view(value).substr(0, comma));
  if (src.path.empty()) throw Error("empty source path");
  src.azimuth_deg = ParseDouble(Trim(std::string_view(value).substr(comma + 1)));
  if (src.azimuth_deg < 0.0 || src.azimuth_deg > 180.0) {
    throw Error("azimuth must be within [0, 180] degrees");
  }
  return src;
}

AudioBuffer LoadSource(const ScenarioSource& src, const Scenario& scenario) {
  constexpr std::string_view kSynth = "synth:";
  if (src.path.starts_with(kSynth)) {
    SpeechLikeOptions options;
    options.duration_s = scenario.synth_duration_s;
    options.sample_rate = scenario.sample_rate;
    return synthesize_speech_like(ParseUnsigned(src.path.substr(kSynth.size())),
                                  options);
  }
  std::filesystem::path path(src.path);
  if (path.is_relative()) path = scenario.base_dir / path;
  AudioBuffer audio = read_wav(path.string());
  if (audio.channel_count() != 1) {
    throw Error("source must be mono: " + path.string());
  }
  if (audio.sample_rate() != scenario.sample_rate) {
    throw Error("sample rate mismatch: " + path.string());
  }
  return audio;
}

}  // namespace

Scenario default_scenario() {
  Scenario s;
  s.target = {"synth:1", 90.0};
  s.interferers = {{"synth:2", 60.0}};
  return s;
}

Scenario parse_scenario(std::istream& in, const std::string& name,
                        const std::filesystem::path& base_dir) {
  Scenario s;
  s.base_dir = base_dir;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    const std::string text = Trim(line.substr(0, hash));
    if (text.empty()) continue;
    try {
      const auto eq = text.find('=');
      if (eq == std::string::npos) throw Error("expected key=value");
      const std::string key = Trim(std::string_view(text).substr(0, eq));
      const std::string value = Trim(std::string_view(text).substr(eq + 1));
      if (key == "target") {
        s.target = ParseSource(value);
      } else if (key == "interferer") {
        s.interferers.push_back(ParseSource(value));
      } else if (key == "sir_db") {
        s.sir_db = ParseDouble(value);
      } else if (key == "seed") {
        s.seed = ParseUnsigned(value);
      } else if (key == "echo_t60_ms") {
        s.echo_t60_ms = ParseDouble(value);
      } else if (key == "snr_db") {
        s.snr_db = ParseDouble(value);
      } else if (key == "spacing_m") {
        s.spacing_m = ParseDouble(value);
      } else if (key == "sample_rate") {
        s.sample_rate = static_cast<int>(ParseUnsigned(value));
      } else if (key == "synth_duration_s") {
        s.synth_duration_s = ParseDouble(value);
      } else {
        throw Error("unknown key '" + key + "'");
      }
    } catch (const Error& e) {
      throw Error(name + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file: " + path.string());
  return parse_scenario(in, path.string(), path.parent_path());
}

SimulatedScene simulate_scenario(const Scenario& scenario) {
  MixtureSpec spec;
  spec.target = {scenario.target.azimuth_deg, LoadSource(scenario.target, scenario),
                 SourceRole::kTarget};
  for (const auto& src : scenario.interferers) {
    spec.interferers.push_back(
        {src.azimuth_deg, LoadSource(src, scenario), SourceRole::kInterference});
  }
  spec.sir_db = scenario.sir_db;
  spec.sensor_noise_snr_db = scenario.snr_db;
  if (scenario.echo_t60_ms) {
    spec.echo_taps = exponential_echo_taps(*scenario.echo_t60_ms / 1000.0,
                                           scenario.seed + 0x9e3779b97f4a7c15ULL);
  }
  return synthesize_mixture(spec, ArrayGeometry::two_mic(scenario.spacing_m),
                            scenario.seed);
}

}  // namespace azoom
