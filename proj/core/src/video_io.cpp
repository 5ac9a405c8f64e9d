#include <cmath>

#include "binary_io.hpp"
#include "pat/data.hpp"

namespace pat {

std::vector<std::uint8_t> encode_video(const VideoSequence& video) {
  const Shape& s = video.shape();
  detail::ByteWriter w;
  w.bytes("VSEQ", 4);
  w.u32(kVideoFormatVersion);
  w.u32(static_cast<std::uint32_t>(video.length()));
  w.u32(s.height);
  w.u32(s.width);
  w.u32(s.channels);
  for (const Frame& f : video.frames()) w.f32s(f.data());
  return w.take();
}

VideoSequence decode_video(std::span<const std::uint8_t> bytes, std::string id) {
  detail::ByteReader r(bytes, "video '" + id + "'");
  if (!r.magic("VSEQ")) throw FormatError("video '" + id + "': bad magic, expected VSEQ");
  const std::uint32_t version = r.u32();
  if (version != kVideoFormatVersion) {
    throw UnsupportedVersionError("video '" + id + "': unsupported version " +
                                  std::to_string(version));
  }
  const std::uint32_t T = r.u32();
  const Shape shape{r.u32(), r.u32(), r.u32()};
  if (T < VideoSequence::kMinFrames) {
    throw FormatError("video '" + id + "': " + std::to_string(T) + " frames, need at least " +
                      std::to_string(VideoSequence::kMinFrames));
  }
  if (shape.height == 0 || shape.width == 0 || shape.channels == 0) {
    throw FormatError("video '" + id + "': zero frame dimension");
  }
  // Check sizes against the available bytes before allocating anything; the
  // products are bounded by `available` so they cannot overflow.
  const std::size_t available = r.remaining() / 4;
  std::size_t per_frame = shape.height;
  for (std::uint32_t d : {shape.width, shape.channels, T}) {
    if (per_frame > available / d) {
      throw TruncatedError("video '" + id + "': header declares " + std::to_string(T) + "x" +
                           shape.to_string() + " but only " + std::to_string(r.remaining()) +
                           " payload bytes follow");
    }
    per_frame *= d;
  }
  const std::size_t total = per_frame;
  per_frame = total / T;
  r.require(total * 4);
  if (r.remaining() != total * 4) {
    throw FormatError("video '" + id + "': " + std::to_string(r.remaining() - total * 4) +
                      " trailing bytes");
  }

  std::vector<Frame> frames;
  frames.reserve(T);
  for (std::uint32_t t = 0; t < T; ++t) {
    std::vector<float> data(per_frame);
    r.f32s(data);
    for (float v : data) {
      if (!(v >= 0.0f && v <= 1.0f)) {
        throw RangeError("video '" + id + "': frame " + std::to_string(t) +
                         " has a value outside [0, 1]");
      }
    }
    frames.emplace_back(shape, std::move(data));
  }
  return VideoSequence(std::move(frames), std::move(id));
}

void write_video(const std::filesystem::path& path, const VideoSequence& video) {
  write_file(path, encode_video(video));
}

VideoSequence read_video(const std::filesystem::path& path) {
  return decode_video(read_file(path), path.stem().string());
}

}  // namespace pat
