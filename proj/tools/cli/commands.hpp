#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "cli/report.hpp"
#include "pat/data.hpp"
#include "pat/detector.hpp"
#include "pat/perturb.hpp"

namespace pat::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitData = 3,
  kExitInvariant = 4,
};

/// Maps an exception to the process exit code.
int exit_code_for(const std::exception& e);

// ---------------------------------------------------------------------------
// Corpus directories
//
// A corpus directory holds <id>.vseq files and manifest.json:
//   {"schema": 1, "videos": ["video_0000", ...]}
// Attack output adds <id>.labels.json per video:
//   {"schema": 1, "video": "video_0000", "labels": ["clean", "adversarial", ...]}

void write_manifest(const fs::path& dir, const std::vector<std::string>& ids);
/// Ids from manifest.json, or every *.vseq stem in sorted order when the
/// directory has no manifest.
std::vector<std::string> read_manifest(const fs::path& dir);
std::vector<VideoSequence> load_corpus(const fs::path& dir);

void write_labels(const fs::path& dir, const std::string& id, const std::vector<FrameLabel>& labels);
std::vector<FrameLabel> read_labels(const fs::path& dir, const std::string& id);

// ---------------------------------------------------------------------------
// Commands

struct SynthOptions {
  fs::path out;
  SynthConfig config;
};

/// Writes one .vseq per video plus the manifest; returns the ids.
std::vector<std::string> cmd_synth(const SynthOptions& opts);

enum class AttackMode { Sparse, Dense };
AttackMode parse_attack_mode(const std::string& text);

struct AttackOptions {
  fs::path in;
  fs::path out;
  AttackMode mode = AttackMode::Sparse;
  double rho = 0.225;
  double sigma = 0.03;
  double eps = 0.03;
  bool circular_shift = true;
  RngSeed seed{};
};

/// Attacks every video of the input corpus; returns the number of
/// adversarial frames written.
std::size_t cmd_attack(const AttackOptions& opts);

struct TrainOptions {
  fs::path clean;
  fs::path out;
  TrainConfig config;
  bool verbose = false;
};

/// Writes the model to opts.out and the config echo plus per-epoch history
/// next to it as <stem>.history.json.
TrainHistory cmd_train(const TrainOptions& opts);
fs::path history_path_for(const fs::path& model_path);

struct DetectOptions {
  fs::path model;
  fs::path video;  // .vseq file or image directory
  std::uint32_t threshold = 3;
};

struct DetectResult {
  std::string video_id;
  DetectionReport report;
};

DetectResult cmd_detect(const DetectOptions& opts);

struct EvalOptions {
  fs::path model;
  fs::path clean;   // may be empty: adversarial videos only
  fs::path adv;     // may be empty: clean videos only
  fs::path labels;  // defaults to adv
  std::uint32_t threshold = 3;
  fs::path report;  // optional output path
};

/// Frames of clean videos are labelled clean. An adversarial-corpus video is
/// adversarial when any of its frame labels is.
EvalReport cmd_eval(const EvalOptions& opts);

struct BenchOptions {
  std::uint32_t height = 112;
  std::uint32_t width = 112;
  std::uint32_t channels = 3;
  std::uint32_t frames = 40;
  std::uint32_t videos = 10;
  fs::path model;  // optional; a randomly initialised model otherwise
  RngSeed seed{};
};

struct BenchResult {
  double transition_frames_per_second = 0.0;
  double mean_detection_seconds = 0.0;
};

BenchResult cmd_bench(const BenchOptions& opts);
nlohmann::json to_json(const BenchResult& result);

}  // namespace pat::cli
