#include "cli/report.hpp"

#include "pat/error.hpp"

namespace pat::cli {

using nlohmann::json;

namespace {

void check_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw FormatError(std::string("report field '") + what + "' outside [0, 1]");
  }
}

void check_time(double v, const char* what) {
  if (!(v >= 0.0)) throw FormatError(std::string("report field '") + what + "' is negative");
}

// nlohmann throws its own exception types; surface them as format errors.
template <typename F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed ") + what + ": " + e.what());
  }
}

void check_schema(const json& doc) {
  if (!doc.is_object() || !doc.contains("schema")) throw FormatError("missing schema field");
  if (doc.at("schema").get<int>() != kReportSchema) {
    throw UnsupportedVersionError("unsupported report schema " + doc.at("schema").dump());
  }
}

}  // namespace

FrameLabel parse_label(const std::string& text) {
  if (text == "clean") return FrameLabel::Clean;
  if (text == "adversarial") return FrameLabel::Adversarial;
  throw FormatError("unknown frame label '" + text + "'");
}

void validate(const EvalReport& r) {
  check_unit(r.fdr, "fdr");
  check_unit(r.vdr, "vdr");
  check_unit(r.auc, "auc");
  check_time(r.total_seconds, "total_seconds");
  check_time(r.mean_detection_seconds, "mean_detection_seconds");
  for (const auto& v : r.per_video) {
    check_unit(v.max_score, "max_score");
    check_time(v.elapsed_seconds, "elapsed_seconds");
    if (v.flagged > v.frames || v.frames_correct > v.frames) {
      throw FormatError("per-video counts exceed frame count for '" + v.id + "'");
    }
  }
  if (r.confusion.total() != r.per_video.size()) {
    throw FormatError("confusion matrix does not cover every video");
  }
}

json to_json(const EvalReport& r) {
  json videos = json::array();
  for (const auto& v : r.per_video) {
    videos.push_back({{"id", v.id},
                      {"truth", to_string(v.truth)},
                      {"verdict", to_string(v.verdict)},
                      {"frames", v.frames},
                      {"flagged", v.flagged},
                      {"frames_correct", v.frames_correct},
                      {"max_score", v.max_score},
                      {"elapsed_seconds", v.elapsed_seconds}});
  }
  return {{"schema", kReportSchema},
          {"fdr", r.fdr},
          {"vdr", r.vdr},
          {"auc", r.auc},
          {"confusion",
           {{"true_positive", r.confusion.true_positive},
            {"false_positive", r.confusion.false_positive},
            {"true_negative", r.confusion.true_negative},
            {"false_negative", r.confusion.false_negative}}},
          {"per_video", videos},
          {"config", r.config},
          {"timings",
           {{"total_seconds", r.total_seconds},
            {"mean_detection_seconds", r.mean_detection_seconds}}}};
}

EvalReport eval_report_from_json(const json& doc) {
  EvalReport r = guarded("eval report", [&] {
    check_schema(doc);
    EvalReport out;
    out.fdr = doc.at("fdr").get<double>();
    out.vdr = doc.at("vdr").get<double>();
    out.auc = doc.at("auc").get<double>();
    const auto& c = doc.at("confusion");
    out.confusion.true_positive = c.at("true_positive").get<std::size_t>();
    out.confusion.false_positive = c.at("false_positive").get<std::size_t>();
    out.confusion.true_negative = c.at("true_negative").get<std::size_t>();
    out.confusion.false_negative = c.at("false_negative").get<std::size_t>();
    for (const auto& v : doc.at("per_video")) {
      VideoSummary s;
      s.id = v.at("id").get<std::string>();
      s.truth = parse_label(v.at("truth").get<std::string>());
      s.verdict = parse_label(v.at("verdict").get<std::string>());
      s.frames = v.at("frames").get<std::size_t>();
      s.flagged = v.at("flagged").get<std::size_t>();
      s.frames_correct = v.at("frames_correct").get<std::size_t>();
      s.max_score = v.at("max_score").get<double>();
      s.elapsed_seconds = v.at("elapsed_seconds").get<double>();
      out.per_video.push_back(std::move(s));
    }
    out.config = doc.at("config");
    out.total_seconds = doc.at("timings").at("total_seconds").get<double>();
    out.mean_detection_seconds = doc.at("timings").at("mean_detection_seconds").get<double>();
    return out;
  });
  validate(r);
  return r;
}

json to_json(const DetectionReport& report, const std::string& video_id) {
  json flags = json::array();
  for (auto f : report.per_frame_flags()) flags.push_back(to_string(f));
  return {{"schema", kReportSchema},
          {"video", video_id},
          {"scores", report.per_frame_scores()},
          {"flags", flags},
          {"adversarial_frames", report.adversarial_count()},
          {"threshold", report.threshold_used()},
          {"verdict", to_string(report.video_verdict())},
          {"elapsed_seconds", report.elapsed_seconds()}};
}

DetectionReport detection_report_from_json(const json& doc) {
  return guarded("detection report", [&] {
    check_schema(doc);
    DetectionReport r(doc.at("scores").get<std::vector<double>>(),
                      doc.at("threshold").get<std::uint32_t>(),
                      doc.at("elapsed_seconds").get<double>());
    // Flags and verdict are derived from the scores; reject documents where
    // the stored copies disagree.
    const auto& flags = doc.at("flags");
    if (flags.size() != r.per_frame_flags().size()) throw FormatError("flag count mismatch");
    for (std::size_t i = 0; i < flags.size(); ++i) {
      if (parse_label(flags[i].get<std::string>()) != r.per_frame_flags()[i]) {
        throw FormatError("flag " + std::to_string(i) + " disagrees with its score");
      }
    }
    if (parse_label(doc.at("verdict").get<std::string>()) != r.video_verdict()) {
      throw FormatError("verdict disagrees with flags");
    }
    return r;
  });
}

json to_json(const TrainConfig& c) {
  json out = {{"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"learning_rate", c.learning_rate},
              {"momentum", c.momentum},
              {"sigma_mode", c.sigma_mode.to_string()},
              {"input_mode", to_string(c.input_mode)},
              {"seed", c.seed.value}};
  if (c.architecture) {
    out["conv_channels"] = c.architecture->conv_channels;
    out["dense_widths"] = c.architecture->dense_widths;
  }
  return out;
}

json to_json(const TrainHistory& history) {
  json epochs = json::array();
  for (std::size_t i = 0; i < history.size(); ++i) {
    epochs.push_back({{"epoch", i + 1},
                      {"mean_loss", history[i].mean_loss},
                      {"accuracy", history[i].accuracy},
                      {"examples", history[i].examples}});
  }
  return epochs;
}

}  // namespace pat::cli
