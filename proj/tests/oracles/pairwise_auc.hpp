#pragma once

// Brute-force AUC: probability that a random positive outscores a random
// negative, ties counted as one half. O(P * N); test use only.

#include <span>
#include <stdexcept>

#include "pat/core.hpp"

namespace pat::oracle {

inline double pairwise_auc(std::span<const double> scores, std::span<const FrameLabel> truth) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (truth[i] != FrameLabel::Adversarial) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (truth[j] != FrameLabel::Clean) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) {
        wins += 1.0;
      } else if (scores[i] == scores[j]) {
        wins += 0.5;
      }
    }
  }
  if (pairs == 0.0) throw std::invalid_argument("pairwise_auc needs both classes");
  return wins / pairs;
}

}  // namespace pat::oracle
