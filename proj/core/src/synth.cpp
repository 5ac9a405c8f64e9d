#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <iomanip>

#include "pat/data.hpp"
#include "pat/error.hpp"

namespace pat {

const char* to_string(BackgroundMode mode) {
  return mode == BackgroundMode::Gradient ? "gradient" : "uniform";
}

BackgroundMode parse_background_mode(std::string_view text) {
  if (text == "uniform") return BackgroundMode::UniformRandom;
  if (text == "gradient") return BackgroundMode::Gradient;
  throw ConfigError("background must be 'uniform' or 'gradient', got '" + std::string(text) +
                    "'");
}

void SynthConfig::validate() const {
  if (video_count == 0) throw ConfigError("video count must be positive");
  if (frames_per_video < VideoSequence::kMinFrames) {
    throw ConfigError("videos need at least 2 frames");
  }
  if (height < 8 || width < 8) throw ConfigError("synthetic frames must be at least 8x8");
  if (channels == 0) throw ConfigError("channel count must be positive");
  if (object_count == 0) throw ConfigError("object count must be positive");
  const auto [lo, hi] = velocity_range;
  const double limit = std::min(height, width) / 4.0;
  if (!(lo >= 0.0 && lo <= hi && hi <= limit)) {
    throw ConfigError("velocity range must satisfy 0 <= lo <= hi <= " + std::to_string(limit));
  }
}

namespace {

struct MovingObject {
  bool disc = false;
  int half_extent = 2;
  double x0 = 0.0;
  double y0 = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  std::vector<float> color;
};

std::vector<float> make_background(const SynthConfig& cfg, Rng& rng) {
  const std::size_t H = cfg.height;
  const std::size_t W = cfg.width;
  const std::size_t C = cfg.channels;
  std::vector<float> bg(H * W * C);
  if (cfg.background_mode == BackgroundMode::UniformRandom) {
    for (auto& v : bg) v = static_cast<float>(rng.uniform01());
    return bg;
  }
  for (std::size_t c = 0; c < C; ++c) {
    const double base = rng.uniform(0.25, 0.75);
    const double gx = rng.uniform(-0.25, 0.25);
    const double gy = rng.uniform(-0.25, 0.25);
    for (std::size_t y = 0; y < H; ++y) {
      for (std::size_t x = 0; x < W; ++x) {
        const double v = base + gx * static_cast<double>(x) / static_cast<double>(W - 1) +
                         gy * static_cast<double>(y) / static_cast<double>(H - 1);
        bg[(y * W + x) * C + c] = static_cast<float>(std::clamp(v, 0.0, 1.0));
      }
    }
  }
  return bg;
}

MovingObject make_object(const SynthConfig& cfg, Rng& rng) {
  MovingObject o;
  const int min_dim = static_cast<int>(std::min(cfg.height, cfg.width));
  const int lo = std::max(2, min_dim / 16);
  const int hi = std::max(lo, min_dim / 8);
  o.disc = rng.uniform01() < 0.5;
  o.half_extent = lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
  o.x0 = rng.uniform(0.0, cfg.width - 1.0);
  o.y0 = rng.uniform(0.0, cfg.height - 1.0);
  const double speed = rng.uniform(cfg.velocity_range.first, cfg.velocity_range.second);
  const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  o.vx = speed * std::cos(angle);
  o.vy = speed * std::sin(angle);
  o.color.resize(cfg.channels);
  for (auto& c : o.color) c = static_cast<float>(rng.uniform(0.5, 1.0));
  return o;
}

void draw(const SynthConfig& cfg, const MovingObject& o, std::size_t t, std::vector<float>& px,
          std::vector<std::uint8_t>& coverage) {
  const long cx = std::lround(o.x0 + o.vx * static_cast<double>(t));
  const long cy = std::lround(o.y0 + o.vy * static_cast<double>(t));
  const long r = o.half_extent;
  const long W = cfg.width;
  const long H = cfg.height;
  const std::size_t C = cfg.channels;
  for (long y = std::max(0L, cy - r); y <= std::min(H - 1, cy + r); ++y) {
    for (long x = std::max(0L, cx - r); x <= std::min(W - 1, cx + r); ++x) {
      if (o.disc && (x - cx) * (x - cx) + (y - cy) * (y - cy) > r * r) continue;
      const std::size_t p = static_cast<std::size_t>(y * W + x);
      coverage[p] = 1;
      for (std::size_t c = 0; c < C; ++c) px[p * C + c] = o.color[c];
    }
  }
}

std::string video_id(std::size_t i) {
  std::ostringstream os;
  os << "video_" << std::setw(4) << std::setfill('0') << i;
  return os.str();
}

}  // namespace

std::vector<SynthVideo> synth_videos_with_coverage(const SynthConfig& cfg) {
  cfg.validate();
  Rng master(cfg.seed);
  const Shape shape{cfg.height, cfg.width, cfg.channels};
  std::vector<SynthVideo> out;
  out.reserve(cfg.video_count);
  for (std::uint32_t v = 0; v < cfg.video_count; ++v) {
    // One child stream per video keeps each video independent of the others.
    Rng rng(master.split());
    const auto background = make_background(cfg, rng);
    std::vector<MovingObject> objects;
    for (std::uint32_t k = 0; k < cfg.object_count; ++k) objects.push_back(make_object(cfg, rng));

    std::vector<Frame> frames;
    std::vector<std::vector<std::uint8_t>> coverage;
    for (std::size_t t = 0; t < cfg.frames_per_video; ++t) {
      std::vector<float> px = background;
      std::vector<std::uint8_t> cov(std::size_t{cfg.height} * cfg.width, 0);
      for (const auto& o : objects) draw(cfg, o, t, px, cov);
      frames.emplace_back(shape, std::move(px));
      coverage.push_back(std::move(cov));
    }
    out.push_back({VideoSequence(std::move(frames), video_id(v)), std::move(coverage)});
  }
  return out;
}

std::vector<VideoSequence> synth_videos(const SynthConfig& cfg) {
  auto full = synth_videos_with_coverage(cfg);
  std::vector<VideoSequence> out;
  out.reserve(full.size());
  for (auto& s : full) out.push_back(std::move(s.video));
  return out;
}

}  // namespace pat
