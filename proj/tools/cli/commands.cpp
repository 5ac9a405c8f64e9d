#include "cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>

#include "pat/error.hpp"
#include "pat/metrics.hpp"
#include "pat/transition.hpp"

namespace pat::cli {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void write_json(const fs::path& path, const json& doc) {
  const std::string text = doc.dump(2) + "\n";
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

json read_json(const fs::path& path) {
  const auto bytes = read_file(path);
  try {
    return json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

VideoSequence load_video_arg(const fs::path& path) {
  if (fs::is_directory(path)) return load_image_dir(path);
  return read_video(path);
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kExitConfig;
  if (dynamic_cast<const InvariantError*>(&e)) return kExitInvariant;
  if (dynamic_cast<const Error*>(&e)) return kExitData;
  return kExitInvariant;
}

// ---------------------------------------------------------------------------

void write_manifest(const fs::path& dir, const std::vector<std::string>& ids) {
  write_json(dir / "manifest.json", {{"schema", kReportSchema}, {"videos", ids}});
}

std::vector<std::string> read_manifest(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  const fs::path manifest = dir / "manifest.json";
  if (fs::exists(manifest)) {
    const json doc = read_json(manifest);
    try {
      if (doc.at("schema").get<int>() != kReportSchema) {
        throw UnsupportedVersionError(manifest.string() + ": unsupported schema");
      }
      return doc.at("videos").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw FormatError(manifest.string() + ": " + e.what());
    }
  }
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".vseq") {
      ids.push_back(entry.path().stem().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<VideoSequence> load_corpus(const fs::path& dir) {
  std::vector<VideoSequence> videos;
  for (const auto& id : read_manifest(dir)) videos.push_back(read_video(dir / (id + ".vseq")));
  return videos;
}

void write_labels(const fs::path& dir, const std::string& id,
                  const std::vector<FrameLabel>& labels) {
  json names = json::array();
  for (auto l : labels) names.push_back(to_string(l));
  write_json(dir / (id + ".labels.json"),
             {{"schema", kReportSchema}, {"video", id}, {"labels", names}});
}

std::vector<FrameLabel> read_labels(const fs::path& dir, const std::string& id) {
  const fs::path path = dir / (id + ".labels.json");
  const json doc = read_json(path);
  try {
    if (doc.at("schema").get<int>() != kReportSchema) {
      throw UnsupportedVersionError(path.string() + ": unsupported schema");
    }
    if (doc.at("video").get<std::string>() != id) {
      throw FormatError(path.string() + ": labels belong to another video");
    }
    std::vector<FrameLabel> labels;
    for (const auto& l : doc.at("labels")) labels.push_back(parse_label(l.get<std::string>()));
    return labels;
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

std::vector<std::string> cmd_synth(const SynthOptions& opts) {
  const auto videos = synth_videos(opts.config);
  ensure_dir(opts.out);
  std::vector<std::string> ids;
  for (const auto& v : videos) {
    write_video(opts.out / (v.id() + ".vseq"), v);
    ids.push_back(v.id());
  }
  write_manifest(opts.out, ids);
  return ids;
}

AttackMode parse_attack_mode(const std::string& text) {
  if (text == "sparse") return AttackMode::Sparse;
  if (text == "dense") return AttackMode::Dense;
  throw ConfigError("attack mode must be 'sparse' or 'dense', got '" + text + "'");
}

std::size_t cmd_attack(const AttackOptions& opts) {
  // Validate before touching the filesystem.
  if (opts.mode == AttackMode::Sparse) {
    if (!(opts.rho > 0.0 && opts.rho <= 1.0)) throw ConfigError("--rho must be in (0, 1]");
    if (!(opts.sigma > 0.0)) throw ConfigError("--sigma must be positive");
  } else if (!(opts.eps > 0.0)) {
    throw ConfigError("--eps must be positive");
  }
  const auto ids = read_manifest(opts.in);
  ensure_dir(opts.out);
  Rng master(opts.seed);
  std::size_t adversarial = 0;
  for (const auto& id : ids) {
    const VideoSequence video = read_video(opts.in / (id + ".vseq"));
    Rng rng(master.split());
    const AttackedVideo attacked =
        opts.mode == AttackMode::Sparse
            ? surrogate_sparse_attack(video, opts.rho, opts.sigma, rng)
            : surrogate_dense_attack(video, opts.eps, rng, opts.circular_shift);
    write_video(opts.out / (id + ".vseq"), attacked.video);
    write_labels(opts.out, id, attacked.labels);
    adversarial += static_cast<std::size_t>(
        std::count(attacked.labels.begin(), attacked.labels.end(), FrameLabel::Adversarial));
  }
  write_manifest(opts.out, ids);
  return adversarial;
}

fs::path history_path_for(const fs::path& model_path) {
  fs::path p = model_path;
  p.replace_extension(".history.json");
  return p;
}

TrainHistory cmd_train(const TrainOptions& opts) {
  opts.config.validate();
  const auto videos = load_corpus(opts.clean);
  if (videos.empty()) throw ConfigError("no videos in " + opts.clean.string());
  const auto start = Clock::now();
  EpochCallback report;
  if (opts.verbose) {
    report = [](std::uint32_t epoch, const EpochStats& s) {
      std::fprintf(stderr, "epoch %u  loss %.5f  accuracy %.4f\n", epoch, s.mean_loss,
                   s.accuracy);
    };
  }
  TrainResult result = train(videos, opts.config, report);
  const double elapsed = seconds_since(start);
  save_model(opts.out, result.model);
  write_json(history_path_for(opts.out), {{"schema", kReportSchema},
                                          {"config", to_json(opts.config)},
                                          {"videos", videos.size()},
                                          {"epochs", to_json(result.history)},
                                          {"train_seconds", elapsed}});
  return result.history;
}

DetectResult cmd_detect(const DetectOptions& opts) {
  if (opts.threshold < 1) throw ConfigError("--threshold must be at least 1");
  const DetectorModel model = load_model(opts.model);
  const VideoSequence video = load_video_arg(opts.video);
  return {video.id(), detect_video(model, video, opts.threshold)};
}

EvalReport cmd_eval(const EvalOptions& opts) {
  if (opts.threshold < 1) throw ConfigError("--threshold must be at least 1");
  if (opts.clean.empty() && opts.adv.empty()) throw ConfigError("need --clean and/or --adv");
  const auto start = Clock::now();
  const DetectorModel model = load_model(opts.model);
  const fs::path label_dir = opts.labels.empty() ? opts.adv : opts.labels;

  std::vector<FrameLabel> frame_pred, frame_truth, video_truth, verdicts;
  std::vector<std::vector<FrameLabel>> video_flags;
  std::vector<double> video_scores;
  EvalReport out;
  double detect_seconds = 0.0;

  auto run = [&](const VideoSequence& video, std::vector<FrameLabel> truth) {
    if (truth.size() != video.length()) {
      throw ShapeError("labels for '" + video.id() + "' cover " + std::to_string(truth.size()) +
                       " frames, video has " + std::to_string(video.length()));
    }
    const DetectionReport r = detect_video(model, video, opts.threshold);
    const auto& flags = r.per_frame_flags();
    VideoSummary s;
    s.id = video.id();
    s.truth = std::find(truth.begin(), truth.end(), FrameLabel::Adversarial) != truth.end()
                  ? FrameLabel::Adversarial
                  : FrameLabel::Clean;
    s.verdict = r.video_verdict();
    s.frames = video.length();
    s.flagged = r.adversarial_count();
    for (std::size_t i = 0; i < truth.size(); ++i) s.frames_correct += flags[i] == truth[i];
    s.max_score = r.max_score();
    s.elapsed_seconds = r.elapsed_seconds();
    detect_seconds += r.elapsed_seconds();

    frame_pred.insert(frame_pred.end(), flags.begin(), flags.end());
    frame_truth.insert(frame_truth.end(), truth.begin(), truth.end());
    video_flags.push_back(flags);
    video_truth.push_back(s.truth);
    verdicts.push_back(s.verdict);
    video_scores.push_back(s.max_score);
    out.per_video.push_back(std::move(s));
  };

  if (!opts.clean.empty()) {
    for (const auto& v : load_corpus(opts.clean)) {
      run(v, std::vector<FrameLabel>(v.length(), FrameLabel::Clean));
    }
  }
  if (!opts.adv.empty()) {
    for (const auto& id : read_manifest(opts.adv)) {
      run(read_video(opts.adv / (id + ".vseq")), read_labels(label_dir, id));
    }
  }
  if (out.per_video.empty()) throw ConfigError("no videos to evaluate");

  out.fdr = fdr(frame_pred, frame_truth);
  out.vdr = vdr(video_flags, video_truth, opts.threshold);
  const bool both_classes =
      std::count(video_truth.begin(), video_truth.end(), FrameLabel::Adversarial) > 0 &&
      std::count(video_truth.begin(), video_truth.end(), FrameLabel::Clean) > 0;
  // AUC needs both classes; with one class it is undefined and reported as 0.
  out.auc = both_classes ? auc(roc_curve(video_scores, video_truth)) : 0.0;
  out.confusion = confusion(verdicts, video_truth);
  out.config = {{"model", opts.model.string()},
                {"clean", opts.clean.string()},
                {"adv", opts.adv.string()},
                {"labels", label_dir.string()},
                {"threshold", opts.threshold},
                {"video_score", "max_frame_score"},
                {"auc_defined", both_classes}};
  out.mean_detection_seconds = detect_seconds / static_cast<double>(out.per_video.size());
  out.total_seconds = seconds_since(start);
  validate(out);
  if (!opts.report.empty()) write_json(opts.report, to_json(out));
  return out;
}

BenchResult cmd_bench(const BenchOptions& opts) {
  SynthConfig cfg;
  cfg.video_count = opts.videos;
  cfg.frames_per_video = opts.frames;
  cfg.height = opts.height;
  cfg.width = opts.width;
  cfg.channels = opts.channels;
  cfg.seed = opts.seed;
  const auto videos = synth_videos(cfg);

  BenchResult out;
  auto start = Clock::now();
  std::size_t frames = 0;
  for (const auto& v : videos) frames += transition_sequence(v).frames.size();
  out.transition_frames_per_second = static_cast<double>(frames) / seconds_since(start);

  DetectorModel model = [&] {
    if (!opts.model.empty()) return load_model(opts.model);
    Rng rng(opts.seed);
    return model_init<float>(DetectorArchitecture::default_for(videos.front().shape()), rng);
  }();
  double total = 0.0;
  for (const auto& v : videos) total += detect_video(model, v, 3).elapsed_seconds();
  out.mean_detection_seconds = total / static_cast<double>(videos.size());
  return out;
}

json to_json(const BenchResult& r) {
  return {{"schema", kReportSchema},
          {"transition_frames_per_second", r.transition_frames_per_second},
          {"mean_detection_seconds", r.mean_detection_seconds}};
}

}  // namespace pat::cli
