#include "pat/perturb.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "pat/error.hpp"

namespace pat {
namespace {

double parse_double(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("cannot parse " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

SigmaMode SigmaMode::varying(double lo, double hi) {
  if (!(lo > 0.0 && lo < hi && hi <= 1.0)) {
    throw ConfigError("varying sigma requires 0 < lo < hi <= 1");
  }
  return SigmaMode(Kind::Varying, lo, hi);
}

SigmaMode SigmaMode::fixed(double value) {
  if (!(value > 0.0 && value <= 1.0)) {
    throw ConfigError("fixed sigma requires 0 < value <= 1");
  }
  return SigmaMode(Kind::Fixed, value, value);
}

SigmaMode SigmaMode::parse(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = text.find(':', start);
    parts.push_back(text.substr(start, colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts[0] == "varying" && parts.size() == 3) {
    return varying(parse_double(parts[1], "sigma lo"), parse_double(parts[2], "sigma hi"));
  }
  if (parts[0] == "fixed" && parts.size() == 2) {
    return fixed(parse_double(parts[1], "sigma"));
  }
  throw ConfigError("sigma mode must be 'varying:LO:HI' or 'fixed:V', got '" +
                    std::string(text) + "'");
}

std::string SigmaMode::to_string() const {
  // Shortest text that parses back to the same double.
  auto fmt = [](double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general);
    return std::string(buf, res.ptr);
  };
  if (kind_ == Kind::Fixed) return "fixed:" + fmt(lo_);
  return "varying:" + fmt(lo_) + ":" + fmt(hi_);
}

double sample_sigma(Rng& rng, const SigmaMode& mode) {
  if (mode.kind() == SigmaMode::Kind::Fixed) return mode.lo();
  return rng.uniform(mode.lo(), mode.hi());
}

Frame gaussian_mask(Rng& rng, const Shape& shape, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("gaussian mask sigma must be positive");
  }
  std::vector<float> data(shape.size());
  for (auto& v : data) v = static_cast<float>(sigma * rng.normal());
  return Frame(shape, std::move(data));
}

Frame pseudo_adversarial(const Frame& tr, Rng& rng, const SigmaMode& mode) {
  const double sigma = sample_sigma(rng, mode);
  const Frame mask = gaussian_mask(rng, tr.shape(), sigma);
  std::vector<float> out(tr.size());
  const auto a = tr.data();
  const auto m = mask.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + m[i];
  return Frame(tr.shape(), std::move(out));
}

std::size_t sparse_frame_count(std::size_t frames, double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in (0, 1]");
  // Guard against 0.225 * 40 = 9.000000000000002 rounding up to 10.
  const double exact = rho * static_cast<double>(frames);
  const double nearest = std::round(exact);
  const double count = std::abs(exact - nearest) < 1e-9 ? nearest : std::ceil(exact);
  return std::min(frames, static_cast<std::size_t>(count));
}

AttackedVideo surrogate_sparse_attack(const VideoSequence& video, double rho,
                                      double sigma_atk, Rng& rng) {
  if (!(sigma_atk > 0.0) || !std::isfinite(sigma_atk)) {
    throw ConfigError("sparse attack sigma must be positive");
  }
  const std::size_t T = video.length();
  const std::size_t k = sparse_frame_count(T, rho);

  // Partial Fisher-Yates: the first k entries are a uniform k-subset.
  std::vector<std::size_t> order(T);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(T - i));
    std::swap(order[i], order[j]);
  }
  std::vector<FrameLabel> labels(T, FrameLabel::Clean);
  for (std::size_t i = 0; i < k; ++i) labels[order[i]] = FrameLabel::Adversarial;

  std::vector<Frame> frames;
  frames.reserve(T);
  for (std::size_t t = 0; t < T; ++t) {
    if (labels[t] == FrameLabel::Clean) {
      frames.push_back(video[t]);
      continue;
    }
    const auto src = video[t].data();
    std::vector<float> out(src.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double v = src[i] + sigma_atk * rng.normal();
      out[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
    frames.emplace_back(video.shape(), std::move(out));
  }
  return {VideoSequence(std::move(frames), video.id()),
          std::move(labels)};
}

AttackedVideo surrogate_dense_attack(const VideoSequence& video, double eps, Rng& rng,
                                     bool circular_shift) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw ConfigError("dense attack eps must be positive");
  const Shape shape = video.shape();
  std::vector<double> pattern(shape.size());
  for (auto& p : pattern) p = rng.uniform(-eps, eps);

  const std::size_t W = shape.width;
  const std::size_t C = shape.channels;
  const std::size_t T = video.length();
  std::vector<Frame> frames;
  frames.reserve(T);
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t shift = circular_shift ? t % W : 0;
    const auto src = video[t].data();
    std::vector<float> out(src.size());
    for (std::size_t y = 0; y < shape.height; ++y) {
      for (std::size_t x = 0; x < W; ++x) {
        // Pattern column that lands on x after rotating each row by `shift`.
        const std::size_t px = (x + W - shift) % W;
        for (std::size_t c = 0; c < C; ++c) {
          const std::size_t i = (y * W + x) * C + c;
          const double v = src[i] + pattern[(y * W + px) * C + c];
          out[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
      }
    }
    frames.emplace_back(shape, std::move(out));
  }
  return {VideoSequence(std::move(frames), video.id()),
          std::vector<FrameLabel>(T, FrameLabel::Adversarial)};
}

}  // namespace pat
