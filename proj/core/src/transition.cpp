#include "pat/transition.hpp"

#include "pat/error.hpp"

namespace pat {
namespace {

void require_same_shape(const Frame& a, const Frame& b) {
  if (a.shape() != b.shape()) {
    throw ShapeError("transition inputs differ in shape: " + a.shape().to_string() +
                     " vs " + b.shape().to_string());
  }
}

Frame boundary_difference(const Frame& neighbor, const Frame& cur) {
  std::vector<float> out(cur.size());
  const auto n = neighbor.data();
  const auto c = cur.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = n[i] - c[i];
  return Frame(cur.shape(), std::move(out));
}

}  // namespace

Frame transition_frame(const Frame& prev, const Frame& cur, const Frame& next) {
  require_same_shape(prev, cur);
  require_same_shape(next, cur);
  std::vector<float> out(cur.size());
  const auto p = prev.data();
  const auto c = cur.data();
  const auto n = next.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (p[i] + n[i]) * 0.5f - c[i];
  return Frame(cur.shape(), std::move(out));
}

TransitionSequence transition_sequence(const VideoSequence& video) {
  const std::size_t T = video.length();
  TransitionSequence seq;
  seq.source_id = video.id();
  seq.frames.reserve(T);
  seq.frames.push_back(boundary_difference(video[1], video[0]));
  for (std::size_t t = 1; t + 1 < T; ++t) {
    seq.frames.push_back(transition_frame(video[t - 1], video[t], video[t + 1]));
  }
  seq.frames.push_back(boundary_difference(video[T - 2], video[T - 1]));
  return seq;
}

}  // namespace pat
