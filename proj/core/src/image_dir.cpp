#include <png.h>

#include <algorithm>
#include <cctype>

#include "pat/data.hpp"
#include "pat/error.hpp"

namespace pat {
namespace {

struct Raster {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint32_t channels = 0;
  std::vector<std::uint8_t> pixels;
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

Raster decode_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw FormatError("cannot decode '" + path.string() + "': " + image.message);
  }
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw FormatError("'" + path.string() + "' is not an 8-bit image");
  }
  Raster r;
  r.height = image.height;
  r.width = image.width;
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  r.channels = color ? 3 : 1;
  r.pixels.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, r.pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw FormatError("cannot decode '" + path.string() + "': " + msg);
  }
  return r;
}

// Binary netpbm (P5 grayscale, P6 RGB) with maxval 255.
Raster decode_pnm(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  std::size_t pos = 0;
  auto fail = [&](const std::string& why) -> FormatError {
    return FormatError("cannot decode '" + path.string() + "': " + why);
  };
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto number = [&]() -> std::uint32_t {
    skip_space();
    std::uint64_t v = 0;
    const std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(bytes[pos]) && v < (1u << 24)) {
      v = v * 10 + (bytes[pos++] - '0');
    }
    if (pos == start || v >= (1u << 24)) throw fail("bad header field");
    return static_cast<std::uint32_t>(v);
  };

  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    throw fail("not a binary PGM/PPM file");
  }
  pos = 2;
  Raster r;
  r.channels = bytes[1] == '6' ? 3 : 1;
  r.width = number();
  r.height = number();
  const std::uint32_t maxval = number();
  if (maxval != 255) throw fail("only 8-bit (maxval 255) images are supported");
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw fail("bad header terminator");
  ++pos;
  const std::size_t n = std::size_t{r.width} * r.height * r.channels;
  if (n == 0) throw fail("empty image");
  if (bytes.size() - pos < n) throw TruncatedError("'" + path.string() + "': truncated pixels");
  r.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                  bytes.begin() + static_cast<std::ptrdiff_t>(pos + n));
  return r;
}

}  // namespace

VideoSequence load_image_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw IoError("'" + dir.string() + "' is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = lower(entry.path().extension().string());
    if (ext == ".png" || ext == ".ppm" || ext == ".pgm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(), [](const auto& a, const auto& b) {
    return a.filename().string() < b.filename().string();
  });
  if (files.size() < VideoSequence::kMinFrames) {
    throw ShapeError("'" + dir.string() + "' holds " + std::to_string(files.size()) +
                     " image(s); at least 2 required");
  }

  std::vector<Frame> frames;
  frames.reserve(files.size());
  for (const auto& f : files) {
    const Raster r = lower(f.extension().string()) == ".png" ? decode_png(f) : decode_pnm(f);
    std::vector<float> data(r.pixels.size());
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = static_cast<float>(r.pixels[i]) / 255.0f;
    Frame frame(Shape{r.height, r.width, r.channels}, std::move(data), RangeCheck::UnitInterval);
    if (!frames.empty() && frame.shape() != frames.front().shape()) {
      throw ShapeError("'" + f.string() + "' is " + frame.shape().to_string() +
                       " but earlier images are " + frames.front().shape().to_string());
    }
    frames.push_back(std::move(frame));
  }
  auto id = dir.filename().string();
  if (id.empty()) id = dir.parent_path().filename().string();
  return VideoSequence(std::move(frames), id);
}

}  // namespace pat
