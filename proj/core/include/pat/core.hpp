#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pat {

/// Frame dimensions. Data is laid out row-major, channel-last.
struct Shape {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint32_t channels = 0;

  [[nodiscard]] std::size_t size() const {
    return std::size_t{height} * width * channels;
  }
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const Shape&, const Shape&) = default;
};

/// Adversarial is the positive class everywhere.
enum class FrameLabel : std::uint8_t { Clean = 0, Adversarial = 1 };

[[nodiscard]] const char* to_string(FrameLabel label);

enum class RangeCheck {
  None,         // transition frames, noise masks
  UnitInterval  // source video pixels
};

/// One H x W x C image. Immutable once constructed.
class Frame {
 public:
  Frame() = default;
  /// Throws ShapeError if data.size() != shape.size() or any dim is zero,
  /// RangeError on non-finite values or, with RangeCheck::UnitInterval,
  /// values outside [0, 1].
  Frame(Shape shape, std::vector<float> data, RangeCheck check = RangeCheck::None);

  static Frame zeros(Shape shape);
  static Frame filled(Shape shape, float value);

  [[nodiscard]] const Shape& shape() const { return shape_; }
  [[nodiscard]] std::span<const float> data() const { return data_; }
  [[nodiscard]] std::size_t size() const { return data_.size(); }

  [[nodiscard]] float at(std::uint32_t y, std::uint32_t x, std::uint32_t c) const {
    return data_[(std::size_t{y} * shape_.width + x) * shape_.channels + c];
  }
  [[nodiscard]] float operator[](std::size_t i) const { return data_[i]; }

  [[nodiscard]] bool in_unit_interval() const;

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  Shape shape_{};
  std::vector<float> data_;
};

/// Convenience wrapper matching frame_new(h, w, c, data).
Frame make_frame(std::uint32_t height, std::uint32_t width, std::uint32_t channels,
                 std::vector<float> data, RangeCheck check = RangeCheck::None);

/// Ordered frames of identical shape with source pixels in [0, 1].
class VideoSequence {
 public:
  static constexpr std::size_t kMinFrames = 2;

  VideoSequence() = default;
  /// Throws ShapeError for fewer than kMinFrames frames or mixed shapes, and
  /// RangeError if any pixel lies outside [0, 1].
  VideoSequence(std::vector<Frame> frames, std::string id);

  [[nodiscard]] const std::vector<Frame>& frames() const { return frames_; }
  [[nodiscard]] const Frame& operator[](std::size_t t) const { return frames_[t]; }
  [[nodiscard]] std::size_t length() const { return frames_.size(); }
  [[nodiscard]] const Shape& shape() const { return frames_.front().shape(); }
  [[nodiscard]] const std::string& id() const { return id_; }

  friend bool operator==(const VideoSequence&, const VideoSequence&) = default;

 private:
  std::vector<Frame> frames_;
  std::string id_;
};

struct LabeledFrame {
  Frame frame;
  FrameLabel label = FrameLabel::Clean;
  std::string video_id;
  std::size_t frame_index = 0;
};

/// Container of labeled (transition) frames for training and evaluation.
class LabeledFrameSet {
 public:
  /// Throws ShapeError on a shape differing from the first item and
  /// ConfigError on a duplicate (video_id, frame_index).
  void add(LabeledFrame item);

  [[nodiscard]] const std::vector<LabeledFrame>& items() const { return items_; }
  [[nodiscard]] std::size_t size() const { return items_.size(); }
  [[nodiscard]] bool empty() const { return items_.empty(); }

 private:
  std::vector<LabeledFrame> items_;
  std::set<std::pair<std::string, std::size_t>> keys_;
};

/// Per-frame scores of one video plus the derived flags and verdict.
///
/// Flags and verdict are never stored independently of the scores: a frame is
/// flagged when its score is at least kFrameDecisionThreshold, and the video
/// is adversarial when at least `threshold` frames are flagged.
class DetectionReport {
 public:
  static constexpr double kFrameDecisionThreshold = 0.5;

  /// Throws RangeError for scores outside [0, 1] or negative elapsed time,
  /// ConfigError for threshold < 1.
  DetectionReport(std::vector<double> scores, std::uint32_t threshold,
                  double elapsed_seconds = 0.0);

  [[nodiscard]] const std::vector<double>& per_frame_scores() const { return scores_; }
  [[nodiscard]] const std::vector<FrameLabel>& per_frame_flags() const { return flags_; }
  [[nodiscard]] FrameLabel video_verdict() const { return verdict_; }
  [[nodiscard]] std::uint32_t threshold_used() const { return threshold_; }
  [[nodiscard]] double elapsed_seconds() const { return elapsed_; }
  [[nodiscard]] std::size_t adversarial_count() const;
  [[nodiscard]] double max_score() const;

  friend bool operator==(const DetectionReport&, const DetectionReport&) = default;

 private:
  std::vector<double> scores_;
  std::vector<FrameLabel> flags_;
  FrameLabel verdict_ = FrameLabel::Clean;
  std::uint32_t threshold_ = 1;
  double elapsed_ = 0.0;
};

[[nodiscard]] FrameLabel flag_for_score(double score);

}  // namespace pat
