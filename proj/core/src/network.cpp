#include "network.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstring>

#include "pat/error.hpp"

namespace pat::detail {
namespace {

template <class T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using MatMap = Eigen::Map<Mat<T>>;
template <class T>
using ConstMatMap = Eigen::Map<const Mat<T>>;
template <class T>
using VecMap = Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>>;
template <class T>
using ConstVecMap = Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>>;

// log(1 + exp(x)) without overflow.
double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace

template <class T>
Engine<T>::Engine(const DetectorArchitecture& arch) : arch_(arch) {
  arch_.validate();
  std::uint32_t c = arch_.input.channels;
  std::uint32_t h = arch_.input.height;
  std::uint32_t w = arch_.input.width;
  for (std::uint32_t out : arch_.conv_channels) {
    ConvLayer layer;
    layer.in_channels = c;
    layer.out_channels = out;
    layer.height = h;
    layer.width = w;
    conv_.push_back(std::move(layer));
    c = out;
    h /= 2;
    w /= 2;
  }
  std::uint32_t in = static_cast<std::uint32_t>(arch_.flattened_size());
  for (std::size_t j = 0; j < arch_.dense_widths.size(); ++j) {
    DenseLayer layer;
    layer.in = in;
    layer.out = arch_.dense_widths[j];
    layer.rectified = j + 1 < arch_.dense_widths.size();
    dense_.push_back(std::move(layer));
    in = arch_.dense_widths[j];
  }
}

template <class T>
const typename Engine<T>::Buffer& Engine<T>::conv_input(std::size_t l) const {
  return l == 0 ? input_ : conv_[l - 1].pooled;
}

template <class T>
void Engine<T>::im2col(const ConvLayer& layer, const Buffer& in,
                       Buffer& cols) const {
  const std::size_t H = layer.height;
  const std::size_t W = layer.width;
  const std::size_t HW = H * W;
  const std::size_t N = batch_;
  const std::size_t NHW = N * HW;
  cols.resize(std::size_t{layer.in_channels} * 9 * NHW);
  for (std::size_t ci = 0; ci < layer.in_channels; ++ci) {
    for (std::size_t ky = 0; ky < 3; ++ky) {
      for (std::size_t kx = 0; kx < 3; ++kx) {
        T* dst = cols.data() + (ci * 9 + ky * 3 + kx) * NHW;
        for (std::size_t n = 0; n < N; ++n) {
          const T* src = in.data() + (ci * N + n) * HW;
          for (std::size_t y = 0; y < H; ++y) {
            T* d = dst + n * HW + y * W;
            const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(y + ky) - 1;
            if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(H)) {
              std::fill(d, d + W, T{0});
              continue;
            }
            const T* s = src + static_cast<std::size_t>(sy) * W;
            if (kx == 1) {
              std::copy(s, s + W, d);
            } else if (kx == 0) {
              d[0] = T{0};
              std::copy(s, s + W - 1, d + 1);
            } else {
              std::copy(s + 1, s + W, d);
              d[W - 1] = T{0};
            }
          }
        }
      }
    }
  }
}

template <class T>
void Engine<T>::col2im(const ConvLayer& layer, const Buffer& cols,
                       Buffer& out) const {
  const std::size_t H = layer.height;
  const std::size_t W = layer.width;
  const std::size_t HW = H * W;
  const std::size_t N = batch_;
  const std::size_t NHW = N * HW;
  out.assign(std::size_t{layer.in_channels} * NHW, T{0});
  for (std::size_t ci = 0; ci < layer.in_channels; ++ci) {
    for (std::size_t ky = 0; ky < 3; ++ky) {
      for (std::size_t kx = 0; kx < 3; ++kx) {
        const T* src = cols.data() + (ci * 9 + ky * 3 + kx) * NHW;
        for (std::size_t n = 0; n < N; ++n) {
          T* dst = out.data() + (ci * N + n) * HW;
          for (std::size_t y = 0; y < H; ++y) {
            const std::ptrdiff_t sy = static_cast<std::ptrdiff_t>(y + ky) - 1;
            if (sy < 0 || sy >= static_cast<std::ptrdiff_t>(H)) continue;
            const T* s = src + n * HW + y * W;
            T* d = dst + static_cast<std::size_t>(sy) * W;
            if (kx == 1) {
              for (std::size_t x = 0; x < W; ++x) d[x] += s[x];
            } else if (kx == 0) {
              for (std::size_t x = 1; x < W; ++x) d[x - 1] += s[x];
            } else {
              for (std::size_t x = 0; x + 1 < W; ++x) d[x + 1] += s[x];
            }
          }
        }
      }
    }
  }
}

template <class T>
void Engine<T>::forward(const ParameterSet<T>& params, std::span<const Frame* const> batch) {
  if (batch.empty()) throw ConfigError("empty batch");
  weights_.resize(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    weights_[i].assign(params[i].values.begin(), params[i].values.end());
  }
  const Shape& shape = arch_.input;
  for (const Frame* f : batch) {
    if (f->shape() != shape) {
      throw ShapeError("detector expects " + shape.to_string() + " frames, got " +
                       f->shape().to_string());
    }
  }
  batch_ = batch.size();
  const std::size_t N = batch_;
  const std::size_t C = shape.channels;
  const std::size_t HW = std::size_t{shape.height} * shape.width;

  // HWC frames -> (C, N, H, W).
  input_.resize(C * N * HW);
  for (std::size_t n = 0; n < N; ++n) {
    const auto src = batch[n]->data();
    for (std::size_t p = 0; p < HW; ++p) {
      for (std::size_t c = 0; c < C; ++c) {
        input_[(c * N + n) * HW + p] = static_cast<T>(src[p * C + c]);
      }
    }
  }

  std::size_t pi = 0;
  for (std::size_t l = 0; l < conv_.size(); ++l) {
    ConvLayer& layer = conv_[l];
    const std::size_t H = layer.height;
    const std::size_t W = layer.width;
    const std::size_t NHW = N * H * W;
    const std::size_t K = std::size_t{layer.in_channels} * 9;
    const std::size_t Cout = layer.out_channels;

    im2col(layer, conv_input(l), layer.cols);
    layer.activation.resize(Cout * NHW);
    MatMap<T> act(layer.activation.data(), Cout, NHW);
    act.noalias() = ConstMatMap<T>(weights_[pi].data(), Cout, K) *
                    ConstMatMap<T>(layer.cols.data(), K, NHW);
    act.colwise() += ConstVecMap<T>(weights_[pi + 1].data(), Cout);
    act = act.cwiseMax(T{0});

    const std::size_t oh = H / 2;
    const std::size_t ow = W / 2;
    layer.pooled.resize(Cout * N * oh * ow);
    layer.argmax.resize(layer.pooled.size());
    std::size_t o = 0;
    for (std::size_t cn = 0; cn < Cout * N; ++cn) {
      const std::size_t base = cn * H * W;
      for (std::size_t oy = 0; oy < oh; ++oy) {
        for (std::size_t ox = 0; ox < ow; ++ox, ++o) {
          const std::size_t i0 = base + (2 * oy) * W + 2 * ox;
          const std::size_t cand[4] = {i0, i0 + 1, i0 + W, i0 + W + 1};
          std::size_t best = cand[0];
          for (std::size_t k = 1; k < 4; ++k) {
            if (layer.activation[cand[k]] > layer.activation[best]) best = cand[k];
          }
          layer.pooled[o] = layer.activation[best];
          layer.argmax[o] = static_cast<std::uint32_t>(best);
        }
      }
    }
    pi += 2;
  }

  // (C, N, hw) -> (C * hw, N)
  const Buffer& last = conv_.empty() ? input_ : conv_.back().pooled;
  const std::size_t lastC = conv_.empty() ? C : conv_.back().out_channels;
  const std::size_t hw = std::size_t{arch_.pooled_height()} * arch_.pooled_width();
  flat_.resize(lastC * hw * N);
  for (std::size_t c = 0; c < lastC; ++c) {
    for (std::size_t n = 0; n < N; ++n) {
      const T* src = last.data() + (c * N + n) * hw;
      for (std::size_t p = 0; p < hw; ++p) flat_[(c * hw + p) * N + n] = src[p];
    }
  }

  const Buffer* x = &flat_;
  for (DenseLayer& layer : dense_) {
    layer.output.resize(std::size_t{layer.out} * N);
    MatMap<T> z(layer.output.data(), layer.out, N);
    z.noalias() = ConstMatMap<T>(weights_[pi].data(), layer.out, layer.in) *
                  ConstMatMap<T>(x->data(), layer.in, N);
    z.colwise() += ConstVecMap<T>(weights_[pi + 1].data(), layer.out);
    if (layer.rectified) z = z.cwiseMax(T{0});
    x = &layer.output;
    pi += 2;
  }
}

template <class T>
double Engine<T>::logit(std::size_t n, std::size_t k) const {
  return static_cast<double>(dense_.back().output[k * batch_ + n]);
}

template <class T>
std::vector<ClassProbabilities> Engine<T>::probabilities() const {
  std::vector<ClassProbabilities> out(batch_);
  for (std::size_t n = 0; n < batch_; ++n) {
    const double d = logit(n, 1) - logit(n, 0);
    out[n].adversarial = 1.0 / (1.0 + std::exp(-d));
    out[n].clean = 1.0 / (1.0 + std::exp(d));
  }
  return out;
}

template <class T>
double Engine<T>::loss(std::span<const FrameLabel> labels) {
  if (labels.size() != batch_) {
    throw ShapeError("batch has " + std::to_string(batch_) + " items but " +
                     std::to_string(labels.size()) + " labels");
  }
  const std::size_t N = batch_;
  dlogits_.assign(2 * N, T{0});
  double total = 0.0;
  const auto probs = probabilities();
  for (std::size_t n = 0; n < N; ++n) {
    const std::size_t truth = labels[n] == FrameLabel::Adversarial ? 1 : 0;
    // -log softmax_truth = softplus(z_other - z_truth)
    total += softplus(logit(n, 1 - truth) - logit(n, truth));
    const double inv = 1.0 / static_cast<double>(N);
    dlogits_[0 * N + n] = static_cast<T>((probs[n].clean - (truth == 0 ? 1.0 : 0.0)) * inv);
    dlogits_[1 * N + n] =
        static_cast<T>((probs[n].adversarial - (truth == 1 ? 1.0 : 0.0)) * inv);
  }
  return total / static_cast<double>(N);
}

template <class T>
void Engine<T>::backward(ParameterSet<T>& grads) {
  grads_.resize(weights_.size());
  for (std::size_t i = 0; i < weights_.size(); ++i) grads_[i].resize(weights_[i].size());
  backprop();
  if (grads.size() != grads_.size()) {
    grads.clear();
    for (auto& shape : arch_.parameter_shapes()) grads.push_back({std::move(shape), {}});
  }
  for (std::size_t i = 0; i < grads_.size(); ++i) {
    grads[i].values.assign(grads_[i].begin(), grads_[i].end());
  }
}

template <class T>
void Engine<T>::backprop() {
  const std::size_t N = batch_;
  std::size_t pi = weights_.size();
  Buffer* dz = &scratch_a_;
  Buffer* dx = &scratch_b_;
  *dz = dlogits_;

  for (std::size_t j = dense_.size(); j-- > 0;) {
    const DenseLayer& layer = dense_[j];
    pi -= 2;
    const Buffer& x = j == 0 ? flat_ : dense_[j - 1].output;
    ConstMatMap<T> dZ(dz->data(), layer.out, N);
    MatMap<T>(grads_[pi].data(), layer.out, layer.in).noalias() =
        dZ * ConstMatMap<T>(x.data(), layer.in, N).transpose();
    VecMap<T>(grads_[pi + 1].data(), layer.out) = dZ.rowwise().sum();

    dx->resize(std::size_t{layer.in} * N);
    MatMap<T>(dx->data(), layer.in, N).noalias() =
        ConstMatMap<T>(weights_[pi].data(), layer.out, layer.in).transpose() * dZ;
    if (j > 0) {
      for (std::size_t i = 0; i < dx->size(); ++i) {
        if (!(x[i] > T{0})) (*dx)[i] = T{0};
      }
    }
    std::swap(dz, dx);
  }
  if (conv_.empty()) return;

  // (C * hw, N) -> (C, N, hw)
  const std::size_t hw = std::size_t{arch_.pooled_height()} * arch_.pooled_width();
  const std::size_t lastC = conv_.back().out_channels;
  dx->resize(lastC * N * hw);
  for (std::size_t c = 0; c < lastC; ++c) {
    for (std::size_t n = 0; n < N; ++n) {
      T* dst = dx->data() + (c * N + n) * hw;
      for (std::size_t p = 0; p < hw; ++p) dst[p] = (*dz)[(c * hw + p) * N + n];
    }
  }
  std::swap(dz, dx);  // dz holds d(pooled) of the last conv layer

  for (std::size_t l = conv_.size(); l-- > 0;) {
    const ConvLayer& layer = conv_[l];
    pi -= 2;
    const std::size_t NHW = N * layer.height * layer.width;
    const std::size_t K = std::size_t{layer.in_channels} * 9;
    const std::size_t Cout = layer.out_channels;

    // Route pooled gradients to their argmax, through the rectifier.
    dx->assign(Cout * NHW, T{0});
    for (std::size_t o = 0; o < layer.pooled.size(); ++o) {
      const std::uint32_t src = layer.argmax[o];
      if (layer.activation[src] > T{0}) (*dx)[src] = (*dz)[o];
    }
    std::swap(dz, dx);  // dz = d(pre-activation), (Cout, NHW)

    ConstMatMap<T> dA(dz->data(), Cout, NHW);
    MatMap<T>(grads_[pi].data(), Cout, K).noalias() =
        dA * ConstMatMap<T>(layer.cols.data(), K, NHW).transpose();
    VecMap<T>(grads_[pi + 1].data(), Cout) = dA.rowwise().sum();

    if (l == 0) break;
    scratch_cols_.resize(K * NHW);
    MatMap<T>(scratch_cols_.data(), K, NHW).noalias() =
        ConstMatMap<T>(weights_[pi].data(), Cout, K).transpose() * dA;
    col2im(layer, scratch_cols_, *dx);
    std::swap(dz, dx);  // dz = d(pooled) of layer l - 1
  }
}

template class Engine<float>;
template class Engine<double>;

}  // namespace pat::detail
