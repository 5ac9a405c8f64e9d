#include "pat/detector.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "network.hpp"
#include "pat/error.hpp"
#include "pat/transition.hpp"

namespace pat {

const char* to_string(InputMode mode) {
  return mode == InputMode::Original ? "original" : "transition";
}

InputMode parse_input_mode(std::string_view text) {
  if (text == "transition") return InputMode::Transition;
  if (text == "original") return InputMode::Original;
  throw ConfigError("input mode must be 'transition' or 'original', got '" +
                    std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// Architecture

DetectorArchitecture DetectorArchitecture::default_for(const Shape& input) {
  return DetectorArchitecture{input, {16, 32, 64}, {128, 2}};
}

void DetectorArchitecture::validate() const {
  if (input.height == 0 || input.width == 0 || input.channels == 0) {
    throw ConfigError("detector input dimensions must be positive");
  }
  if (conv_channels.size() >= 16) throw ConfigError("too many conv blocks");
  const std::uint32_t div = 1u << conv_channels.size();
  if (input.height % div != 0 || input.width % div != 0) {
    throw ConfigError("input " + input.to_string() + " not divisible by 2^" +
                      std::to_string(conv_channels.size()) + " for pooling");
  }
  if (std::find(conv_channels.begin(), conv_channels.end(), 0u) != conv_channels.end()) {
    throw ConfigError("conv blocks need at least one output channel");
  }
  if (dense_widths.empty() || dense_widths.back() != 2) {
    throw ConfigError("final dense layer must have width 2");
  }
  if (std::find(dense_widths.begin(), dense_widths.end(), 0u) != dense_widths.end()) {
    throw ConfigError("dense layers need positive width");
  }
}

std::uint32_t DetectorArchitecture::pooled_height() const {
  return input.height >> conv_channels.size();
}

std::uint32_t DetectorArchitecture::pooled_width() const {
  return input.width >> conv_channels.size();
}

std::size_t DetectorArchitecture::flattened_size() const {
  const std::size_t c = conv_channels.empty() ? input.channels : conv_channels.back();
  return c * pooled_height() * pooled_width();
}

std::vector<std::vector<std::size_t>> DetectorArchitecture::parameter_shapes() const {
  std::vector<std::vector<std::size_t>> shapes;
  std::size_t in = input.channels;
  for (std::uint32_t out : conv_channels) {
    shapes.push_back({out, in, 3, 3});
    shapes.push_back({out});
    in = out;
  }
  in = flattened_size();
  for (std::uint32_t out : dense_widths) {
    shapes.push_back({out, in});
    shapes.push_back({out});
    in = out;
  }
  return shapes;
}

// ---------------------------------------------------------------------------
// Model

namespace {

std::size_t element_count(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

template <class T>
ParameterSet<T> zero_parameters(const DetectorArchitecture& arch) {
  ParameterSet<T> params;
  for (auto& shape : arch.parameter_shapes()) {
    const std::size_t n = element_count(shape);
    params.push_back({std::move(shape), std::vector<T>(n, T{0})});
  }
  return params;
}

}  // namespace

template <class T>
ParameterSet<T> zeros_like(const ParameterSet<T>& params) {
  ParameterSet<T> out;
  out.reserve(params.size());
  for (const auto& t : params) out.push_back({t.shape, std::vector<T>(t.values.size(), T{0})});
  return out;
}

template <class T>
BasicDetector<T>::BasicDetector(DetectorArchitecture arch, InputMode mode)
    : arch_(std::move(arch)), mode_(mode) {
  arch_.validate();
  params_ = zero_parameters<T>(arch_);
}

template <class T>
BasicDetector<T>::BasicDetector(DetectorArchitecture arch, InputMode mode,
                                ParameterSet<T> params, bool trained)
    : arch_(std::move(arch)), mode_(mode), params_(std::move(params)), trained_(trained) {
  arch_.validate();
  const auto shapes = arch_.parameter_shapes();
  if (shapes.size() != params_.size()) {
    throw ShapeError("expected " + std::to_string(shapes.size()) + " parameter tensors, got " +
                     std::to_string(params_.size()));
  }
  for (std::size_t i = 0; i < shapes.size(); ++i) {
    if (params_[i].shape != shapes[i] || params_[i].values.size() != element_count(shapes[i])) {
      throw ShapeError("parameter tensor " + std::to_string(i) +
                       " does not match the architecture");
    }
  }
  if (!all_finite()) throw RangeError("detector parameters contain non-finite values");
}

template <class T>
std::size_t BasicDetector<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : params_) n += t.values.size();
  return n;
}

template <class T>
bool BasicDetector<T>::all_finite() const {
  for (const auto& t : params_) {
    for (T v : t.values) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

template <class T>
BasicDetector<T> model_init(const DetectorArchitecture& arch, Rng& rng, InputMode mode) {
  BasicDetector<T> model(arch, mode);
  auto& params = model.mutable_parameters();
  const std::size_t last_weight = params.size() - 2;
  for (std::size_t i = 0; i < params.size(); i += 2) {
    auto& w = params[i];
    std::size_t fan_in = 1;
    for (std::size_t d = 1; d < w.shape.size(); ++d) fan_in *= w.shape[d];
    // The output layer has no rectifier after it, so it gets unit gain.
    const double gain = i == last_weight ? 1.0 : 2.0;
    const double stddev = std::sqrt(gain / static_cast<double>(fan_in));
    for (auto& v : w.values) v = static_cast<T>(stddev * rng.normal());
  }
  return model;
}

// ---------------------------------------------------------------------------
// Forward / backward entry points

namespace {

std::vector<const Frame*> pointers(std::span<const Frame> frames) {
  std::vector<const Frame*> out;
  out.reserve(frames.size());
  for (const Frame& f : frames) out.push_back(&f);
  return out;
}

}  // namespace

template <class T>
std::vector<ClassProbabilities> forward(const BasicDetector<T>& model,
                                        std::span<const Frame> batch) {
  if (batch.empty()) return {};
  detail::Engine<T> engine(model.architecture());
  engine.forward(model.parameters(), pointers(batch));
  return engine.probabilities();
}

template <class T>
LossAndGrads<T> loss_and_grads(const BasicDetector<T>& model, std::span<const Frame> batch,
                               std::span<const FrameLabel> labels) {
  if (batch.size() != labels.size()) {
    throw ShapeError("batch has " + std::to_string(batch.size()) + " frames but " +
                     std::to_string(labels.size()) + " labels");
  }
  detail::Engine<T> engine(model.architecture());
  engine.forward(model.parameters(), pointers(batch));
  LossAndGrads<T> out;
  out.loss = engine.loss(labels);
  engine.backward(out.grads);
  return out;
}

template <class T>
void sgd_step(ParameterSet<T>& params, const ParameterSet<T>& grads,
              const SgdSettings& settings, ParameterSet<T>& velocity) {
  if (grads.size() != params.size()) throw ShapeError("gradient set does not match parameters");
  if (velocity.empty()) velocity = zeros_like(params);
  if (velocity.size() != params.size()) throw ShapeError("velocity does not match parameters");
  const T mu = static_cast<T>(settings.momentum);
  const T lr = static_cast<T>(settings.learning_rate);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& w = params[i].values;
    auto& v = velocity[i].values;
    const auto& g = grads[i].values;
    if (g.size() != w.size() || v.size() != w.size()) {
      throw ShapeError("tensor " + std::to_string(i) + " size mismatch in sgd_step");
    }
    for (std::size_t k = 0; k < w.size(); ++k) {
      v[k] = mu * v[k] - lr * g[k];
      w[k] += v[k];
    }
  }
}

// ---------------------------------------------------------------------------
// Training

void TrainConfig::validate() const {
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be positive");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
  if (architecture) architecture->validate();
}

std::vector<Frame> detector_inputs(const VideoSequence& video, InputMode mode) {
  if (mode == InputMode::Original) return video.frames();
  return transition_sequence(video).frames;
}

TrainResult train(std::span<const VideoSequence> clean_videos, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  if (clean_videos.empty()) throw ConfigError("training corpus is empty");
  const Shape shape = clean_videos.front().shape();
  const DetectorArchitecture arch =
      config.architecture.value_or(DetectorArchitecture::default_for(shape));
  for (const auto& v : clean_videos) {
    if (v.shape() != arch.input) {
      throw ShapeError("video '" + v.id() + "' has frames " + v.shape().to_string() +
                       " but the detector expects " + arch.input.to_string());
    }
  }

  // Detector inputs are deterministic, so compute them once.
  std::vector<Frame> base;
  for (const auto& v : clean_videos) {
    auto inputs = detector_inputs(v, config.input_mode);
    std::move(inputs.begin(), inputs.end(), std::back_inserter(base));
  }

  Rng rng(config.seed);
  TrainResult result;
  result.model = model_init<float>(arch, rng, config.input_mode);
  auto& params = result.model.mutable_parameters();
  ParameterSet<float> grads;
  ParameterSet<float> velocity;
  const SgdSettings sgd{config.learning_rate, config.momentum};
  detail::Engine<float> engine(arch);

  // Example e is the clean input of base[e / 2] when e is even and its
  // pseudo-adversarial counterpart when odd.
  std::vector<std::size_t> order(2 * base.size());
  std::vector<Frame> noisy;
  std::vector<const Frame*> batch;
  std::vector<FrameLabel> labels;

  for (std::uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      std::swap(order[i], order[static_cast<std::size_t>(rng.below(i + 1))]);
    }

    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      noisy.clear();
      noisy.reserve(end - start);
      batch.clear();
      labels.clear();
      for (std::size_t i = start; i < end; ++i) {
        const Frame& clean = base[order[i] / 2];
        if (order[i] % 2 == 0) {
          labels.push_back(FrameLabel::Clean);
        } else {
          noisy.push_back(pseudo_adversarial(clean, rng, config.sigma_mode));
          labels.push_back(FrameLabel::Adversarial);
        }
      }
      std::size_t k = 0;
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(order[i] % 2 == 0 ? &base[order[i] / 2] : &noisy[k++]);
      }

      engine.forward(params, batch);
      const double loss = engine.loss(labels);
      const auto probs = engine.probabilities();
      for (std::size_t n = 0; n < probs.size(); ++n) {
        if (flag_for_score(probs[n].adversarial) == labels[n]) ++correct;
      }
      loss_sum += loss * static_cast<double>(end - start);
      engine.backward(grads);
      sgd_step(params, grads, sgd, velocity);
    }

    const EpochStats stats{loss_sum / static_cast<double>(order.size()),
                           static_cast<double>(correct) / static_cast<double>(order.size()),
                           order.size()};
    if (!std::isfinite(stats.mean_loss)) {
      throw InvariantError("training diverged in epoch " + std::to_string(epoch + 1));
    }
    result.history.push_back(stats);
    if (on_epoch) on_epoch(epoch + 1, stats);
  }
  if (!result.model.all_finite()) throw InvariantError("trained weights are not finite");
  result.model.set_trained(true);
  return result;
}

// ---------------------------------------------------------------------------
// Inference

namespace {
constexpr std::size_t kInferenceChunk = 16;
}

std::vector<double> score_frames(const DetectorModel& model, std::span<const Frame> inputs) {
  std::vector<double> scores;
  scores.reserve(inputs.size());
  if (inputs.empty()) return scores;
  detail::Engine<float> engine(model.architecture());
  for (std::size_t start = 0; start < inputs.size(); start += kInferenceChunk) {
    const auto chunk =
        inputs.subspan(start, std::min(kInferenceChunk, inputs.size() - start));
    engine.forward(model.parameters(), pointers(chunk));
    for (const auto& p : engine.probabilities()) scores.push_back(p.adversarial);
  }
  return scores;
}

double predict_frame(const DetectorModel& model, const Frame& input) {
  return score_frames(model, std::span<const Frame>(&input, 1)).front();
}

DetectionReport detect_video(const DetectorModel& model, const VideoSequence& video,
                             std::uint32_t threshold) {
  if (threshold < 1) throw ConfigError("video threshold must be >= 1");
  if (video.shape() != model.architecture().input) {
    throw ShapeError("video '" + video.id() + "' has frames " + video.shape().to_string() +
                     " but the model expects " + model.architecture().input.to_string());
  }
  const auto t0 = std::chrono::steady_clock::now();
  const auto inputs = detector_inputs(video, model.input_mode());
  auto scores = score_frames(model, inputs);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;
  return DetectionReport(std::move(scores), threshold, elapsed.count());
}

// ---------------------------------------------------------------------------

#define PAT_INSTANTIATE(T)                                                              \
  template ParameterSet<T> zeros_like(const ParameterSet<T>&);                          \
  template class BasicDetector<T>;                                                      \
  template BasicDetector<T> model_init<T>(const DetectorArchitecture&, Rng&, InputMode); \
  template std::vector<ClassProbabilities> forward(const BasicDetector<T>&,              \
                                                   std::span<const Frame>);              \
  template LossAndGrads<T> loss_and_grads(const BasicDetector<T>&, std::span<const Frame>, \
                                          std::span<const FrameLabel>);                  \
  template void sgd_step(ParameterSet<T>&, const ParameterSet<T>&, const SgdSettings&,   \
                         ParameterSet<T>&);

PAT_INSTANTIATE(float)
PAT_INSTANTIATE(double)

#undef PAT_INSTANTIATE

}  // namespace pat
