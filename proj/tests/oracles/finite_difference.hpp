#pragma once

// Central finite differences of the mean cross-entropy with respect to every
// detector parameter. Uses only the forward pass (loss value), never the
// analytic backward pass it is meant to check.

#include <algorithm>
#include <cmath>
#include <span>

#include "pat/detector.hpp"

namespace pat::oracle {

inline ParameterSet<double> finite_difference_grads(const BasicDetector<double>& model,
                                                    std::span<const Frame> batch,
                                                    std::span<const FrameLabel> labels,
                                                    double h = 1e-5) {
  BasicDetector<double> probe = model;
  ParameterSet<double> grads = zeros_like(model.parameters());
  auto& params = probe.mutable_parameters();
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (std::size_t k = 0; k < params[t].values.size(); ++k) {
      const double saved = params[t].values[k];
      params[t].values[k] = saved + h;
      const double plus = loss_and_grads(probe, batch, labels).loss;
      params[t].values[k] = saved - h;
      const double minus = loss_and_grads(probe, batch, labels).loss;
      params[t].values[k] = saved;
      grads[t].values[k] = (plus - minus) / (2.0 * h);
    }
  }
  return grads;
}

/// |a - b| / max(|a|, |b|), with the denominator floored so that two
/// gradients that are both numerically zero compare as equal.
inline double relative_error(double a, double b, double floor = 1e-6) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace pat::oracle
