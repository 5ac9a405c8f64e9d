#include "pat/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pat/error.hpp"

namespace pat {

std::string Shape::to_string() const {
  std::ostringstream os;
  os << height << "x" << width << "x" << channels;
  return os.str();
}

const char* to_string(FrameLabel label) {
  return label == FrameLabel::Adversarial ? "adversarial" : "clean";
}

Frame::Frame(Shape shape, std::vector<float> data, RangeCheck check)
    : shape_(shape), data_(std::move(data)) {
  if (shape_.height == 0 || shape_.width == 0 || shape_.channels == 0) {
    throw ShapeError("frame dimensions must be positive, got " + shape_.to_string());
  }
  if (data_.size() != shape_.size()) {
    throw ShapeError("frame data has " + std::to_string(data_.size()) +
                     " values, expected " + std::to_string(shape_.size()) + " for " +
                     shape_.to_string());
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    const float v = data_[i];
    if (!std::isfinite(v)) {
      throw RangeError("non-finite frame value at index " + std::to_string(i));
    }
    if (check == RangeCheck::UnitInterval && (v < 0.0f || v > 1.0f)) {
      throw RangeError("pixel value " + std::to_string(v) + " at index " +
                       std::to_string(i) + " outside [0, 1]");
    }
  }
}

Frame Frame::zeros(Shape shape) { return filled(shape, 0.0f); }

Frame Frame::filled(Shape shape, float value) {
  return Frame(shape, std::vector<float>(shape.size(), value));
}

bool Frame::in_unit_interval() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](float v) { return v >= 0.0f && v <= 1.0f; });
}

Frame make_frame(std::uint32_t height, std::uint32_t width, std::uint32_t channels,
                 std::vector<float> data, RangeCheck check) {
  return Frame(Shape{height, width, channels}, std::move(data), check);
}

VideoSequence::VideoSequence(std::vector<Frame> frames, std::string id)
    : frames_(std::move(frames)), id_(std::move(id)) {
  if (frames_.size() < kMinFrames) {
    throw ShapeError("video '" + id_ + "' has " + std::to_string(frames_.size()) +
                     " frame(s); at least " + std::to_string(kMinFrames) + " required");
  }
  const Shape& s = frames_.front().shape();
  for (std::size_t t = 0; t < frames_.size(); ++t) {
    if (frames_[t].shape() != s) {
      throw ShapeError("video '" + id_ + "' frame " + std::to_string(t) + " has shape " +
                       frames_[t].shape().to_string() + ", expected " + s.to_string());
    }
    if (!frames_[t].in_unit_interval()) {
      throw RangeError("video '" + id_ + "' frame " + std::to_string(t) +
                       " has pixels outside [0, 1]");
    }
  }
}

void LabeledFrameSet::add(LabeledFrame item) {
  if (!items_.empty() && item.frame.shape() != items_.front().frame.shape()) {
    throw ShapeError("labeled frame shape " + item.frame.shape().to_string() +
                     " differs from set shape " +
                     items_.front().frame.shape().to_string());
  }
  if (!keys_.emplace(item.video_id, item.frame_index).second) {
    throw ConfigError("duplicate labeled frame (" + item.video_id + ", " +
                      std::to_string(item.frame_index) + ")");
  }
  items_.push_back(std::move(item));
}

FrameLabel flag_for_score(double score) {
  return score >= DetectionReport::kFrameDecisionThreshold ? FrameLabel::Adversarial
                                                           : FrameLabel::Clean;
}

DetectionReport::DetectionReport(std::vector<double> scores, std::uint32_t threshold,
                                 double elapsed_seconds)
    : scores_(std::move(scores)), threshold_(threshold), elapsed_(elapsed_seconds) {
  if (threshold_ < 1) throw ConfigError("video threshold must be >= 1");
  if (!(elapsed_ >= 0.0)) throw RangeError("elapsed time must be non-negative");
  flags_.reserve(scores_.size());
  for (double s : scores_) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw RangeError("frame score " + std::to_string(s) + " outside [0, 1]");
    }
    flags_.push_back(flag_for_score(s));
  }
  verdict_ = adversarial_count() >= threshold_ ? FrameLabel::Adversarial : FrameLabel::Clean;
}

std::size_t DetectionReport::adversarial_count() const {
  return static_cast<std::size_t>(
      std::count(flags_.begin(), flags_.end(), FrameLabel::Adversarial));
}

double DetectionReport::max_score() const {
  return scores_.empty() ? 0.0 : *std::max_element(scores_.begin(), scores_.end());
}

}  // namespace pat
