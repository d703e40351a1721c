// audiozoom: simulate scenes, zoom two-microphone recordings towards
// broadside, evaluate results and sweep GJBF filter lengths.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "audiozoom/error.h"
#include "audiozoom/pipeline.h"
#include "audiozoom/simd/kernels.h"
#include "audiozoom/wav_io.h"

namespace {

using namespace azoom;

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

// Values of the string-typed flags before conversion.
struct RawFlags {
  std::string beamformer = "mpdr";
  std::string gjbf_length = "250";
  std::string gjbf_sweep;
  std::string bt_macro = "8x16";
  std::string stft_window = "sqrt_hann";
};

std::vector<std::size_t> ParseLengths(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(' ');
    if (first == std::string::npos) continue;
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(item.substr(first), &pos);
    } catch (const std::exception&) {
      throw CLI::ValidationError("lengths", "not an integer: " + item);
    }
    if (v < 1) throw CLI::ValidationError("lengths", "lengths must be positive");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

void AddStftOptions(CLI::App* cmd, PipelineConfig& config, RawFlags& raw) {
  cmd->add_option("--stft-frame", config.stft.frame_length, "STFT frame length (power of two)")
      ->capture_default_str();
  cmd->add_option("--stft-hop", config.stft.hop_length, "STFT hop")->capture_default_str();
  cmd->add_option("--stft-window", raw.stft_window, "hann, sqrt_hann or rect")
      ->check(CLI::IsMember({"hann", "sqrt_hann", "rect"}))
      ->capture_default_str();
}

void AddGjbfOptions(CLI::App* cmd, PipelineConfig& config, RawFlags& raw) {
  cmd->add_option("--gjbf-length", raw.gjbf_length, "adaptive filter taps, or \"auto\"")
      ->capture_default_str();
  cmd->add_option("--gjbf-mu", config.gjbf.step_size, "adaptation step size")
      ->capture_default_str();
  cmd->add_option("--gjbf-sweep", raw.gjbf_sweep, "candidate lengths for auto, e.g. 100,250");
}

void AddPipelineOptions(CLI::App* cmd, PipelineConfig& config, RawFlags& raw) {
  cmd->add_option("--beamformer", raw.beamformer, "mpdr or gjbf")
      ->check(CLI::IsMember({"mpdr", "gjbf"}))
      ->capture_default_str();
  cmd->add_option("--mpdr-alpha", config.mpdr.relative_loading,
                  "diagonal loading relative to trace/2")
      ->capture_default_str();
  AddGjbfOptions(cmd, config, raw);
  cmd->add_option("--bt-enabled", config.bt_enabled, "block-threshold post-filter on/off")
      ->capture_default_str();
  cmd->add_option("--bt-macro", raw.bt_macro, "macro-block frames x bins")->capture_default_str();
  cmd->add_option("--bt-H", config.bt.h, "sub-block size exponent")->capture_default_str();
  cmd->add_option("--bt-threshold", config.bt.zeta_threshold, "threshold block SNR")
      ->capture_default_str();
  cmd->add_option("--normalize", config.normalize_output, "peak-normalize output to -1 dBFS")
      ->capture_default_str();
  cmd->add_option("--seed", config.seed, "seed recorded in reports")->capture_default_str();
  AddStftOptions(cmd, config, raw);
}

void Resolve(PipelineConfig& config, const RawFlags& raw) {
  config.beamformer = parse_beamformer(raw.beamformer);
  config.stft.window = parse_window(raw.stft_window);
  if (raw.gjbf_length == "auto") {
    config.gjbf_auto = true;
  } else {
    const auto lengths = ParseLengths(raw.gjbf_length);
    if (lengths.size() != 1) throw Error("--gjbf-length must be an integer or auto");
    config.gjbf.filter_length = lengths.front();
  }
  if (!raw.gjbf_sweep.empty()) config.gjbf_sweep = ParseLengths(raw.gjbf_sweep);
  const auto x = raw.bt_macro.find('x');
  if (x == std::string::npos) throw Error("--bt-macro must look like PxQ");
  const auto p = ParseLengths(raw.bt_macro.substr(0, x));
  const auto q = ParseLengths(raw.bt_macro.substr(x + 1));
  if (p.size() != 1 || q.size() != 1) throw Error("--bt-macro must look like PxQ");
  config.bt.macro_frames = p.front();
  config.bt.macro_bins = q.front();
  config.validate();
}

// Expands "--config FILE" into "--key value" arguments placed right after the
// subcommand, so that flags given on the command line take precedence.
std::vector<std::string> ExpandConfig(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  for (std::size_t i = 1; i < args.size(); ++i) {
    std::string path;
    std::size_t consumed = 0;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      consumed = 2;
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      consumed = 1;
    } else {
      continue;
    }
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);
    std::vector<std::string> injected;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
      ++number;
      line = line.substr(0, line.find('#'));
      const auto eq = line.find('=');
      auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return std::string();
        return s.substr(a, s.find_last_not_of(" \t\r") - a + 1);
      };
      if (trim(line).empty()) continue;
      if (eq == std::string::npos) {
        throw Error(path + ":" + std::to_string(number) + ": expected key=value");
      }
      injected.push_back("--" + trim(line.substr(0, eq)));
      injected.push_back(trim(line.substr(eq + 1)));
    }
    args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
               args.begin() + static_cast<std::ptrdiff_t>(i + consumed));
    // args[1] is the subcommand.
    args.insert(args.begin() + 2, injected.begin(), injected.end());
    break;
  }
  return args;
}

AudioBuffer ReadMono(const std::string& path) {
  AudioBuffer audio = read_wav(path);
  return audio.channel_count() == 1 ? audio : audio.extract(0);
}

void WriteReport(const std::string& path,
                 const std::vector<std::pair<std::string, std::string>>& header,
                 const EvalReport& report) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error("cannot write report: " + path);
  if (fresh) {
    for (const auto& [k, v] : header) out << "# " << k << '=' << v << '\n';
    out << report_csv_header() << '\n';
  }
  out << report_csv_row(report) << '\n';
}

void DumpMap(const std::filesystem::path& path, std::size_t frames, std::size_t bins,
             const auto& value) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write dump: " + path.string());
  out << "frame,bin,value\n";
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t k = 0; k < bins; ++k) {
      out << f << ',' << k << ',' << value(k, f) << '\n';
    }
  }
}

void DumpSpectrogram(const std::filesystem::path& path, const Spectrogram& s) {
  DumpMap(path, s.frames(), s.bins(),
          [&](std::size_t k, std::size_t f) { return std::abs(s.at(k, f)); });
}

int RunSimulate(const std::string& scenario_path, const std::string& prefix,
                const std::optional<std::uint64_t>& seed) {
  Scenario scenario = scenario_path.empty() ? default_scenario() : load_scenario(scenario_path);
  if (seed) scenario.seed = *seed;
  const SimulatedScene scene = simulate_scenario(scenario);
  const std::filesystem::path parent = std::filesystem::path(prefix).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  write_wav(prefix + "mixture.wav", scene.mixture);
  write_wav(prefix + "target_img.wav", scene.target_image);
  write_wav(prefix + "interf_img.wav", scene.residual_image);
  std::printf("sir_db=%.4f\n", scene.realized_sir_db);
  return 0;
}

struct ZoomArgs {
  std::string input, output, dump_dir, report, target_img, interf_img;
};

int RunZoom(const ZoomArgs& args, const PipelineConfig& config) {
  const AudioBuffer input = read_wav(args.input);
  if (input.channel_count() != 2) throw Error("two channels required");
  const ZoomResult result = run_zoom(input, config);
  AudioBuffer output = result.output;
  double gain = 1.0;
  if (config.normalize_output) gain = normalize_peak(output);
  write_wav(args.output, output);
  std::fprintf(stderr, "output_gain=%.9g\n", gain);
  if (result.sweep) {
    std::fprintf(stderr, "gjbf_length=%zu\n", result.sweep->best_length);
    for (const auto& w : result.sweep->warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  }

  if (!args.dump_dir.empty()) {
    const std::filesystem::path dir(args.dump_dir);
    std::filesystem::create_directories(dir);
    DumpSpectrogram(dir / "input_ch1.csv", stft_padded(input.extract(0), config.stft));
    DumpSpectrogram(dir / "beamformed.csv", result.beamformed_spectrum);
    DumpMap(dir / "sigma2.csv", result.sigma2.frames(), result.sigma2.bins(),
            [&](std::size_t k, std::size_t f) { return result.sigma2.at(k, f); });
    if (result.postfilter) {
      DumpSpectrogram(dir / "postfiltered.csv", result.postfilter->output);
      const TfMap& g = result.postfilter->gains;
      DumpMap(dir / "gains.csv", g.frames(), g.bins(),
              [&](std::size_t k, std::size_t f) { return g.at(k, f); });
      std::ofstream blocks(dir / "blocks.csv");
      write_block_decisions_csv(blocks, *result.postfilter);
    }
  }

  if (!args.target_img.empty() || !args.interf_img.empty()) {
    if (args.target_img.empty() || args.interf_img.empty()) {
      throw Error("--target-img and --interf-img go together");
    }
    const AudioBuffer target = read_wav(args.target_img);
    const AudioBuffer residual = read_wav(args.interf_img);
    const EvalReport report = evaluate(result, target, residual, config);
    print_report(std::cout, report);
    if (!args.report.empty()) {
      auto header = config.describe();
      header.insert(header.begin(), {"command", "zoom"});
      header.emplace_back("output_gain", std::to_string(gain));
      WriteReport(args.report, header, report);
    }
  } else if (!args.report.empty()) {
    throw Error("--report needs --target-img and --interf-img");
  }
  return 0;
}

struct EvalArgs {
  std::string estimate, target_img, interf_img, report;
  std::size_t max_lag = 512;
};

int RunEval(const EvalArgs& args) {
  const AudioBuffer estimate = ReadMono(args.estimate);
  const AudioBuffer target = read_wav(args.target_img);
  const AudioBuffer residual = read_wav(args.interf_img);
  const AudioBuffer reference = target.extract(0);
  if (target.channel_count() != residual.channel_count() ||
      target.frames() != residual.frames()) {
    throw Error("image files differ in shape");
  }
  const Components parts = project_onto_reference(estimate, reference, args.max_lag);
  const StageMetrics metrics{osinr_db(parts.target, parts.residual),
                             mse_db(estimate, reference, args.max_lag)};
  const EvalReport report =
      EvalReport::make(osinr_db(target, residual), metrics, std::nullopt);
  print_report(std::cout, report);
  if (!args.report.empty()) {
    WriteReport(args.report,
                {{"command", "eval"}, {"estimate", args.estimate},
                 {"max-lag", std::to_string(args.max_lag)}},
                report);
  }
  return 0;
}

struct SweepArgs {
  std::string input, csv;
};

int RunSweep(const SweepArgs& args, const PipelineConfig& config) {
  const AudioBuffer input = read_wav(args.input);
  if (input.channel_count() != 2) throw Error("two channels required");
  const FilterLengthSelection sel = select_filter_length(
      input.extract(0), input.extract(1), config.gjbf_sweep, config.gjbf, config.stft);
  std::ostringstream csv;
  csv << "length,mean_sinr_db\n";
  for (const auto& p : sel.curve) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", p.mean_sinr_db);
    csv << p.length << ',' << buf << '\n';
  }
  if (args.csv.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(args.csv);
    if (!out) throw Error("cannot write " + args.csv);
    out << csv.str();
  }
  for (const auto& w : sel.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::fprintf(stderr, "best_length=%zu\n", sel.best_length);
  return 0;
}

int Main(int argc, char** argv) {
  std::vector<std::string> args;
  try {
    args = ExpandConfig(argc, argv);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsageError;
  }

  CLI::App app{"Two-microphone audio zoom towards broadside"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  const std::string config_help = "key=value file of flags (flags given here win)";

  auto* isa = app.add_option_function<std::string>(
      "--isa",
      [](const std::string& name) {
        const auto parsed = simd::parse_isa(name);
        if (!parsed) throw CLI::ValidationError("--isa", "unknown ISA " + name);
        simd::set_active_isa(*parsed);
      },
      "kernel variant: scalar, avx2 or neon");
  (void)isa;

  std::string scenario_path, prefix;
  std::optional<std::uint64_t> sim_seed;
  auto* simulate = app.add_subcommand("simulate", "write a simulated scene");
  simulate->add_option("--scenario", scenario_path, "scenario file (default scene if absent)");
  simulate->add_option("--out", prefix, "output prefix, e.g. out/ or out/scene_")->required();
  simulate->add_option("--seed", sim_seed, "overrides the scenario seed");

  PipelineConfig zoom_config;
  RawFlags zoom_raw;
  ZoomArgs zoom_args;
  auto* zoom = app.add_subcommand("zoom", "beamform and post-filter a 2-channel WAV");
  zoom->add_option("input", zoom_args.input, "2-channel WAV")->required();
  zoom->add_option("output", zoom_args.output, "mono output WAV")->required();
  AddPipelineOptions(zoom, zoom_config, zoom_raw);
  zoom->add_option("--dump", zoom_args.dump_dir, "directory for spectrogram CSV dumps");
  zoom->add_option("--target-img", zoom_args.target_img, "target image WAV for evaluation");
  zoom->add_option("--interf-img", zoom_args.interf_img, "interference image WAV");
  zoom->add_option("--report", zoom_args.report, "append an evaluation row to this CSV");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "score an enhanced WAV against scene images");
  eval->add_option("estimate", eval_args.estimate, "enhanced WAV")->required();
  eval->add_option("--target-img", eval_args.target_img, "target image WAV")->required();
  eval->add_option("--interf-img", eval_args.interf_img, "interference image WAV")->required();
  eval->add_option("--report", eval_args.report, "append a row to this CSV");
  eval->add_option("--max-lag", eval_args.max_lag, "alignment search range in samples")
      ->capture_default_str();

  PipelineConfig sweep_config;
  RawFlags sweep_raw;
  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "score GJBF filter lengths");
  sweep->add_option("input", sweep_args.input, "2-channel WAV")->required();
  sweep->add_option("--lengths", sweep_raw.gjbf_sweep, "candidate lengths, e.g. 100,250,300");
  sweep->add_option("--out", sweep_args.csv, "CSV path (stdout if absent)");
  sweep->add_option("--gjbf-mu", sweep_config.gjbf.step_size, "adaptation step size")
      ->capture_default_str();
  AddStftOptions(sweep, sweep_config, sweep_raw);

  // ExpandConfig has already consumed --config; these entries document it.
  std::string config_path;
  for (auto* cmd : {simulate, zoom, eval, sweep}) {
    cmd->add_option("--config", config_path, config_help);
  }

  std::vector<const char*> cargs;
  for (const auto& a : args) cargs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*simulate) return RunSimulate(scenario_path, prefix, sim_seed);
    if (*zoom) {
      Resolve(zoom_config, zoom_raw);
      return RunZoom(zoom_args, zoom_config);
    }
    if (*eval) return RunEval(eval_args);
    if (*sweep) {
      Resolve(sweep_config, sweep_raw);
      if (sweep_config.gjbf_sweep.size() < 2) {
        throw Error("at least two candidate lengths required");
      }
      return RunSweep(sweep_args, sweep_config);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kDataError;
  }
  return kUsageError;
}

}  // namespace

int main(int argc, char** argv) { return Main(argc, argv); }
