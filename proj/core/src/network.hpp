#pragma once

// Batched forward/backward passes for the detection CNN. Private to the
// library; the public entry points live in detector.cpp.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "pat/detector.hpp"

namespace pat::detail {

/// Reusable activation buffers for one architecture.
///
/// Activations are stored channel-major across the batch, (C, N, H, W), so a
/// whole convolution over the batch is one GEMM against an im2col matrix of
/// shape (C_in * 9, N * H * W).
template <class T>
class Engine {
 public:
  // Eigen picks its vectorised summation order from the buffer address, so
  // everything it touches lives at a fixed alignment to keep results
  // reproducible from run to run.
  using Buffer = std::vector<T, Eigen::aligned_allocator<T>>;

  explicit Engine(const DetectorArchitecture& arch);

  void forward(const ParameterSet<T>& params, std::span<const Frame* const> batch);

  [[nodiscard]] std::size_t batch_size() const { return batch_; }
  /// Logit for class k of item n after forward().
  [[nodiscard]] double logit(std::size_t n, std::size_t k) const;
  [[nodiscard]] std::vector<ClassProbabilities> probabilities() const;

  /// Mean cross-entropy of the last forward pass; also prepares the output
  /// gradient consumed by backward().
  double loss(std::span<const FrameLabel> labels);

  /// Gradients of the mean loss with respect to the parameters given to the
  /// last forward(). `grads` is resized to the parameter shapes.
  void backward(ParameterSet<T>& grads);

 private:
  struct ConvLayer {
    std::uint32_t in_channels = 0;
    std::uint32_t out_channels = 0;
    std::uint32_t height = 0;  // input (and pre-pool output) spatial size
    std::uint32_t width = 0;
    Buffer cols;
    Buffer activation;  // post-rectifier, (out, N, H, W)
    Buffer pooled;      // (out, N, H/2, W/2)
    std::vector<std::uint32_t> argmax;
  };
  struct DenseLayer {
    std::uint32_t in = 0;
    std::uint32_t out = 0;
    bool rectified = true;
    Buffer output;  // (out, N), post-rectifier for hidden layers
  };

  void im2col(const ConvLayer& layer, const Buffer& in, Buffer& cols) const;
  void col2im(const ConvLayer& layer, const Buffer& cols, Buffer& out) const;
  void backprop();
  [[nodiscard]] const Buffer& conv_input(std::size_t l) const;

  DetectorArchitecture arch_;
  std::size_t batch_ = 0;
  Buffer input_;    // (C, N, H, W)
  Buffer flat_;     // (F, N)
  std::vector<ConvLayer> conv_;
  std::vector<DenseLayer> dense_;
  Buffer dlogits_;  // (2, N)
  Buffer scratch_a_;
  Buffer scratch_b_;
  Buffer scratch_cols_;
  std::vector<Buffer> weights_;  // aligned copy of the forward() parameters
  std::vector<Buffer> grads_;
};

extern template class Engine<float>;
extern template class Engine<double>;

}  // namespace pat::detail
