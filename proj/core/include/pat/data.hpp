#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pat/core.hpp"
#include "pat/detector.hpp"
#include "pat/random.hpp"

namespace pat {

// ---------------------------------------------------------------------------
// Synthetic videos

enum class BackgroundMode : std::uint8_t {
  UniformRandom = 0,  // static per-pixel uniform texture
  Gradient = 1        // static linear ramp per channel
};

const char* to_string(BackgroundMode mode);
BackgroundMode parse_background_mode(std::string_view text);

struct SynthConfig {
  std::uint32_t video_count = 1;
  std::uint32_t frames_per_video = 16;
  std::uint32_t height = 64;
  std::uint32_t width = 64;
  std::uint32_t channels = 3;
  std::uint32_t object_count = 1;
  /// Object speed range in pixels/frame; the direction is uniform.
  std::pair<double, double> velocity_range{1.0, 3.0};
  BackgroundMode background_mode = BackgroundMode::UniformRandom;
  RngSeed seed{};

  /// Dims >= 8, at least 2 frames, 0 <= lo <= hi <= min(height, width) / 4.
  void validate() const;
};

struct SynthVideo {
  VideoSequence video;
  /// coverage[t][y * width + x] is 1 where an object was drawn in frame t.
  std::vector<std::vector<std::uint8_t>> coverage;
};

/// Videos of bright rectangles and discs moving at constant velocity over a
/// static background. Objects have hard edges and are clipped at borders;
/// positions are rounded to whole pixels. Ids are "video_0000", ...
std::vector<VideoSequence> synth_videos(const SynthConfig& cfg);
std::vector<SynthVideo> synth_videos_with_coverage(const SynthConfig& cfg);

// ---------------------------------------------------------------------------
// .vseq video files
//
//   offset  size  field
//   0       4     magic "VSEQ"
//   4       4     version (u32 = 1)
//   8       16    T, H, W, C (u32 each)
//   24      4*N   N = T*H*W*C float32 pixels in [0, 1],
//                 frame-major, row-major, channel-last
//
// All integers and floats are little-endian.

inline constexpr std::uint32_t kVideoFormatVersion = 1;

std::vector<std::uint8_t> encode_video(const VideoSequence& video);
/// Throws FormatError (bad magic, inconsistent dims, trailing bytes),
/// TruncatedError, UnsupportedVersionError or RangeError.
VideoSequence decode_video(std::span<const std::uint8_t> bytes, std::string id);

void write_video(const std::filesystem::path& path, const VideoSequence& video);
/// The video id is the file stem.
VideoSequence read_video(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// .patm model files
//
//   "PATM" | u32 version = 1 | u32 input_mode (0 transition, 1 original)
//   | u32 trained (0/1) | u32 H | u32 W | u32 C | u32 layer_count
//   | layer_count x (u32 tag, u32 in, u32 out)
//   | per layer: weights then biases as float32
//
// Tag 1 is a conv block (3x3 kernel, pad 1, rectifier, 2x2 max-pool) with
// weights laid out [out][in][3][3]; tag 2 is a dense layer with weights
// [out][in]. Conv blocks precede dense layers. Little-endian throughout.

inline constexpr std::uint32_t kModelFormatVersion = 1;

std::vector<std::uint8_t> encode_model(const DetectorModel& model);
DetectorModel decode_model(std::span<const std::uint8_t> bytes);

void save_model(const std::filesystem::path& path, const DetectorModel& model);
DetectorModel load_model(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Image directories

/// Loads *.png, *.ppm and *.pgm files (8-bit) in lexicographic filename
/// order, scaling intensities by 1/255. Grayscale images give 1 channel,
/// colour images 3 (alpha is dropped). The video id is the directory name.
VideoSequence load_image_dir(const std::filesystem::path& dir);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace pat
