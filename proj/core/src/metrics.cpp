#include "pat/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pat/error.hpp"

namespace pat {
namespace {

void require_paired(std::size_t a, std::size_t b, const char* what) {
  if (a == 0) throw ConfigError(std::string(what) + ": empty input");
  if (a != b) {
    throw ShapeError(std::string(what) + ": " + std::to_string(a) + " predictions vs " +
                     std::to_string(b) + " labels");
  }
}

}  // namespace

double fdr(std::span<const FrameLabel> predicted, std::span<const FrameLabel> truth) {
  require_paired(predicted.size(), truth.size(), "fdr");
  std::size_t agree = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) agree += predicted[i] == truth[i];
  return static_cast<double>(agree) / static_cast<double>(predicted.size());
}

FrameLabel video_verdict(std::span<const FrameLabel> frame_flags, std::uint32_t threshold) {
  if (threshold < 1) throw ConfigError("video threshold must be >= 1");
  const auto flagged = std::count(frame_flags.begin(), frame_flags.end(), FrameLabel::Adversarial);
  return static_cast<std::size_t>(flagged) >= threshold ? FrameLabel::Adversarial
                                                        : FrameLabel::Clean;
}

double vdr(const std::vector<std::vector<FrameLabel>>& per_video_flags,
           std::span<const FrameLabel> truth, std::uint32_t threshold) {
  require_paired(per_video_flags.size(), truth.size(), "vdr");
  std::size_t agree = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    agree += video_verdict(per_video_flags[i], threshold) == truth[i];
  }
  return static_cast<double>(agree) / static_cast<double>(truth.size());
}

RocCurve roc_curve(std::span<const double> scores, std::span<const FrameLabel> truth) {
  require_paired(scores.size(), truth.size(), "roc_curve");
  const auto positives = static_cast<std::size_t>(
      std::count(truth.begin(), truth.end(), FrameLabel::Adversarial));
  const std::size_t negatives = truth.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw ConfigError("roc_curve needs at least one positive and one negative example");
  }
  for (double s : scores) {
    if (std::isnan(s)) throw RangeError("roc_curve: NaN score");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == s; ++i) {
      if (truth[order[i]] == FrameLabel::Adversarial) {
        ++tp;
      } else {
        ++fp;
      }
    }
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                            static_cast<double>(tp) / static_cast<double>(positives)});
  }
  return curve;
}

double auc(const RocCurve& curve) {
  const auto& p = curve.points;
  if (p.size() < 2) throw ConfigError("auc: curve needs at least two points");
  if (p.front() != RocPoint{0.0, 0.0} || p.back() != RocPoint{1.0, 1.0}) {
    throw ConfigError("auc: curve must run from (0,0) to (1,1)");
  }
  double area = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double dx = p[i].false_positive_rate - p[i - 1].false_positive_rate;
    const double dy = p[i].true_positive_rate - p[i - 1].true_positive_rate;
    if (dx < 0.0 || dy < 0.0) throw ConfigError("auc: curve is not monotone");
    area += dx * (p[i].true_positive_rate + p[i - 1].true_positive_rate) * 0.5;
  }
  return area;
}

ConfusionMatrix confusion(std::span<const FrameLabel> verdicts,
                          std::span<const FrameLabel> truth) {
  require_paired(verdicts.size(), truth.size(), "confusion");
  ConfusionMatrix m;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    const bool predicted = verdicts[i] == FrameLabel::Adversarial;
    const bool actual = truth[i] == FrameLabel::Adversarial;
    if (predicted && actual) {
      ++m.true_positive;
    } else if (predicted) {
      ++m.false_positive;
    } else if (actual) {
      ++m.false_negative;
    } else {
      ++m.true_negative;
    }
  }
  return m;
}

}  // namespace pat
