#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pat/core.hpp"
#include "pat/detector.hpp"
#include "pat/metrics.hpp"

namespace pat::cli {

inline constexpr int kReportSchema = 1;

struct VideoSummary {
  std::string id;
  FrameLabel truth = FrameLabel::Clean;
  FrameLabel verdict = FrameLabel::Clean;
  std::size_t frames = 0;
  std::size_t flagged = 0;
  std::size_t frames_correct = 0;
  double max_score = 0.0;
  double elapsed_seconds = 0.0;

  friend bool operator==(const VideoSummary&, const VideoSummary&) = default;
};

struct EvalReport {
  double fdr = 0.0;
  double vdr = 0.0;
  double auc = 0.0;
  ConfusionMatrix confusion;
  std::vector<VideoSummary> per_video;
  nlohmann::json config = nlohmann::json::object();
  double total_seconds = 0.0;
  double mean_detection_seconds = 0.0;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Throws FormatError when a parsed document violates the schema (missing
/// keys, wrong types, metrics outside [0, 1], negative timings).
void validate(const EvalReport& report);

nlohmann::json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const DetectionReport& report, const std::string& video_id);
DetectionReport detection_report_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const TrainConfig& config);
nlohmann::json to_json(const TrainHistory& history);

FrameLabel parse_label(const std::string& text);

}  // namespace pat::cli
