#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "pat/core.hpp"
#include "pat/perturb.hpp"
#include "pat/random.hpp"

namespace pat {

/// What the detector consumes for each video frame.
enum class InputMode : std::uint8_t {
  Transition = 0,  // transition frames
  Original = 1     // raw source frames (ablation)
};

const char* to_string(InputMode mode);
InputMode parse_input_mode(std::string_view text);

/// Layer layout of the binary detection CNN.
///
/// Each conv block is a 3x3 convolution (stride 1, zero padding 1) followed by
/// a rectifier and 2x2 max-pooling, so every block halves H and W. The pooled
/// map is flattened channel-major and fed through the dense layers; hidden
/// dense layers use rectifiers and the last one produces the two class logits
/// (index 0 = clean, 1 = adversarial).
struct DetectorArchitecture {
  Shape input{};
  std::vector<std::uint32_t> conv_channels;
  std::vector<std::uint32_t> dense_widths;  // last entry must be 2

  /// 16/32/64 conv channels, dense 128 then 2.
  static DetectorArchitecture default_for(const Shape& input);

  /// Throws ConfigError unless the layout is usable.
  void validate() const;

  [[nodiscard]] std::uint32_t pooled_height() const;
  [[nodiscard]] std::uint32_t pooled_width() const;
  [[nodiscard]] std::size_t flattened_size() const;
  /// Shapes of all parameter tensors: per conv block {out, in, 3, 3} then
  /// {out}; per dense layer {out, in} then {out}.
  [[nodiscard]] std::vector<std::vector<std::size_t>> parameter_shapes() const;

  friend bool operator==(const DetectorArchitecture&, const DetectorArchitecture&) = default;
};

template <class T>
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<T> values;

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

template <class T>
using ParameterSet = std::vector<Tensor<T>>;

template <class T>
ParameterSet<T> zeros_like(const ParameterSet<T>& params);

/// The detection network: architecture, weights and metadata.
///
/// DetectorModel (float weights) is the production type; the double
/// instantiation exists for finite-difference gradient checks.
template <class T>
class BasicDetector {
 public:
  using Scalar = T;

  BasicDetector() = default;
  /// Zero-initialised parameters.
  explicit BasicDetector(DetectorArchitecture arch, InputMode mode = InputMode::Transition);
  /// Throws ShapeError on parameter shapes inconsistent with `arch`, RangeError
  /// on non-finite values.
  BasicDetector(DetectorArchitecture arch, InputMode mode, ParameterSet<T> params,
                bool trained);

  [[nodiscard]] const DetectorArchitecture& architecture() const { return arch_; }
  [[nodiscard]] InputMode input_mode() const { return mode_; }
  [[nodiscard]] const ParameterSet<T>& parameters() const { return params_; }
  [[nodiscard]] ParameterSet<T>& mutable_parameters() { return params_; }
  [[nodiscard]] bool trained() const { return trained_; }
  void set_trained(bool trained) { trained_ = trained; }
  [[nodiscard]] std::size_t parameter_count() const;
  [[nodiscard]] bool all_finite() const;

  template <class U>
  [[nodiscard]] BasicDetector<U> cast() const {
    ParameterSet<U> out;
    out.reserve(params_.size());
    for (const auto& t : params_) {
      out.push_back({t.shape, std::vector<U>(t.values.begin(), t.values.end())});
    }
    return BasicDetector<U>(arch_, mode_, std::move(out), trained_);
  }

  friend bool operator==(const BasicDetector&, const BasicDetector&) = default;

 private:
  DetectorArchitecture arch_;
  InputMode mode_ = InputMode::Transition;
  ParameterSet<T> params_;
  bool trained_ = false;
};

using DetectorModel = BasicDetector<float>;

/// He initialisation: weights ~ N(0, 2 / fan_in), biases zero.
template <class T>
BasicDetector<T> model_init(const DetectorArchitecture& arch, Rng& rng,
                            InputMode mode = InputMode::Transition);

struct ClassProbabilities {
  double clean = 0.5;
  double adversarial = 0.5;
};

/// Softmax class probabilities per frame, in batch order.
template <class T>
std::vector<ClassProbabilities> forward(const BasicDetector<T>& model,
                                        std::span<const Frame> batch);

template <class T>
struct LossAndGrads {
  double loss = 0.0;  // mean cross-entropy over the batch
  ParameterSet<T> grads;
};

template <class T>
LossAndGrads<T> loss_and_grads(const BasicDetector<T>& model, std::span<const Frame> batch,
                               std::span<const FrameLabel> labels);

struct SgdSettings {
  double learning_rate = 1e-3;
  double momentum = 0.9;
};

/// Classic momentum: v <- momentum * v - lr * g; w <- w + v.
/// `velocity` is zero-filled to the parameter shapes when empty.
template <class T>
void sgd_step(ParameterSet<T>& params, const ParameterSet<T>& grads,
              const SgdSettings& settings, ParameterSet<T>& velocity);

template <class T>
void sgd_step(BasicDetector<T>& model, const ParameterSet<T>& grads,
              const SgdSettings& settings, ParameterSet<T>& velocity) {
  sgd_step(model.mutable_parameters(), grads, settings, velocity);
}

struct TrainConfig {
  std::uint32_t epochs = 20;
  std::uint32_t batch_size = 32;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  SigmaMode sigma_mode = SigmaMode::varying();
  InputMode input_mode = InputMode::Transition;
  RngSeed seed{};
  /// Defaults to DetectorArchitecture::default_for(corpus frame shape).
  std::optional<DetectorArchitecture> architecture;

  void validate() const;
};

struct EpochStats {
  double mean_loss = 0.0;
  double accuracy = 0.0;
  std::size_t examples = 0;
};

using TrainHistory = std::vector<EpochStats>;

struct TrainResult {
  DetectorModel model;
  TrainHistory history;
};

using EpochCallback = std::function<void(std::uint32_t epoch, const EpochStats&)>;

/// Pseudo-adversarial training.
///
/// Every epoch, each source frame contributes one clean example (its detector
/// input) and one adversarial example (the same input plus Gaussian noise with
/// a freshly drawn sigma). Examples are shuffled, split into minibatches and
/// fitted with mean cross-entropy and momentum SGD. Runs sequentially, so the
/// result is a pure function of the corpus and config.
TrainResult train(std::span<const VideoSequence> clean_videos, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

/// Frames the detector sees for a video under `mode`.
std::vector<Frame> detector_inputs(const VideoSequence& video, InputMode mode);

/// Adversarial probability for one detector input.
double predict_frame(const DetectorModel& model, const Frame& input);

/// Adversarial probabilities for many detector inputs.
std::vector<double> score_frames(const DetectorModel& model, std::span<const Frame> inputs);

/// Scores every frame of a video and applies the video threshold rule.
/// elapsed_seconds covers input construction and inference.
DetectionReport detect_video(const DetectorModel& model, const VideoSequence& video,
                             std::uint32_t threshold);

}  // namespace pat
