#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pat/core.hpp"

namespace pat {

struct RocPoint {
  double false_positive_rate = 0.0;
  double true_positive_rate = 0.0;

  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

/// ROC points ordered by decreasing threshold, from (0, 0) to (1, 1).
struct RocCurve {
  std::vector<RocPoint> points;
};

struct ConfusionMatrix {
  std::size_t true_positive = 0;
  std::size_t false_positive = 0;
  std::size_t true_negative = 0;
  std::size_t false_negative = 0;

  [[nodiscard]] std::size_t total() const {
    return true_positive + false_positive + true_negative + false_negative;
  }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// Frame detection rate: fraction of frames whose predicted label equals the
/// ground truth, over every frame given (clean frames included).
double fdr(std::span<const FrameLabel> predicted, std::span<const FrameLabel> truth);

/// Adversarial iff at least `threshold` frames are flagged adversarial.
FrameLabel video_verdict(std::span<const FrameLabel> frame_flags, std::uint32_t threshold);

/// Video detection rate: fraction of videos whose threshold verdict equals
/// the video ground truth.
double vdr(const std::vector<std::vector<FrameLabel>>& per_video_flags,
           std::span<const FrameLabel> truth, std::uint32_t threshold);

/// Sweeps every distinct score as a threshold (score >= threshold is
/// positive). Equal scores move the curve in one diagonal step.
/// Throws ConfigError unless both classes are present.
RocCurve roc_curve(std::span<const double> scores, std::span<const FrameLabel> truth);

/// Trapezoidal area under a ROC curve.
double auc(const RocCurve& curve);

ConfusionMatrix confusion(std::span<const FrameLabel> verdicts,
                          std::span<const FrameLabel> truth);

}  // namespace pat
