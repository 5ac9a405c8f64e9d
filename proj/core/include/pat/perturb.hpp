#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pat/core.hpp"
#include "pat/random.hpp"

namespace pat {

/// How the pseudo-perturbation standard deviation is chosen per frame.
class SigmaMode {
 public:
  enum class Kind { Varying, Fixed };

  static constexpr double kDefaultLo = 0.0001;
  static constexpr double kDefaultHi = 0.05;

  /// sigma ~ U(lo, hi); requires 0 < lo < hi <= 1.
  static SigmaMode varying(double lo = kDefaultLo, double hi = kDefaultHi);
  /// sigma = value; requires 0 < value <= 1.
  static SigmaMode fixed(double value);
  /// Parses "varying:LO:HI" or "fixed:V".
  static SigmaMode parse(std::string_view text);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] double lo() const { return lo_; }
  [[nodiscard]] double hi() const { return hi_; }
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const SigmaMode&, const SigmaMode&) = default;

 private:
  SigmaMode(Kind kind, double lo, double hi) : kind_(kind), lo_(lo), hi_(hi) {}

  Kind kind_;
  double lo_;
  double hi_;  // equals lo_ for Fixed
};

double sample_sigma(Rng& rng, const SigmaMode& mode);

/// Zero-mean iid Gaussian mask with standard deviation sigma (> 0).
Frame gaussian_mask(Rng& rng, const Shape& shape, double sigma);

/// tr + N(0, sigma) with sigma drawn from `mode`. Not clamped: transition
/// frames live in signed space.
Frame pseudo_adversarial(const Frame& tr, Rng& rng, const SigmaMode& mode);

struct AttackedVideo {
  VideoSequence video;
  std::vector<FrameLabel> labels;
};

/// Number of frames a sparse attack perturbs: ceil(rho * T).
std::size_t sparse_frame_count(std::size_t frames, double rho);

/// Perturbs ceil(rho * T) distinct frames, chosen uniformly, with iid
/// Gaussian pixel noise of std sigma_atk, clamped to [0, 1].
/// Requires 0 < rho <= 1 and sigma_atk > 0.
AttackedVideo surrogate_sparse_attack(const VideoSequence& video, double rho,
                                      double sigma_atk, Rng& rng);

/// Adds one universal pattern drawn from U(-eps, eps) to every frame,
/// clamped to [0, 1]. With circular_shift the pattern at frame t is rotated
/// t pixels along each row. Requires eps > 0.
AttackedVideo surrogate_dense_attack(const VideoSequence& video, double eps, Rng& rng,
                                     bool circular_shift);

}  // namespace pat
