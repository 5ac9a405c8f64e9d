#pragma once

#include <string>
#include <vector>

#include "pat/core.hpp"

namespace pat {

/// Transition frames of a video, aligned 1:1 with its source frames.
/// Values are signed; for source pixels in [0, 1] they lie in [-1, 1].
struct TransitionSequence {
  std::vector<Frame> frames;
  std::string source_id;
};

/// Elementwise ((prev + next) / 2) - cur.
///
/// Static content cancels exactly and linear motion cancels up to rounding,
/// leaving object edges, accelerations and additive perturbations.
/// Throws ShapeError when the three shapes differ.
Frame transition_frame(const Frame& prev, const Frame& cur, const Frame& next);

/// Transition frames for a whole video. Interior frames use both neighbors;
/// the first frame becomes X[1] - X[0] and the last X[T-2] - X[T-1], i.e. the
/// neighbor average is replaced by the single available neighbor.
TransitionSequence transition_sequence(const VideoSequence& video);

}  // namespace pat
