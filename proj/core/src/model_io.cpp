#include "binary_io.hpp"
#include "pat/data.hpp"

namespace pat {
namespace {

constexpr std::uint32_t kConvTag = 1;
constexpr std::uint32_t kDenseTag = 2;
constexpr std::uint32_t kMaxLayers = 64;
constexpr std::uint32_t kMaxDim = 1u << 20;

struct LayerRecord {
  std::uint32_t tag = 0;
  std::uint32_t in = 0;
  std::uint32_t out = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_model(const DetectorModel& model) {
  const auto& arch = model.architecture();
  detail::ByteWriter w;
  w.bytes("PATM", 4);
  w.u32(kModelFormatVersion);
  w.u32(static_cast<std::uint32_t>(model.input_mode()));
  w.u32(model.trained() ? 1 : 0);
  w.u32(arch.input.height);
  w.u32(arch.input.width);
  w.u32(arch.input.channels);
  w.u32(static_cast<std::uint32_t>(arch.conv_channels.size() + arch.dense_widths.size()));
  std::uint32_t in = arch.input.channels;
  for (std::uint32_t out : arch.conv_channels) {
    w.u32(kConvTag);
    w.u32(in);
    w.u32(out);
    in = out;
  }
  in = static_cast<std::uint32_t>(arch.flattened_size());
  for (std::uint32_t out : arch.dense_widths) {
    w.u32(kDenseTag);
    w.u32(in);
    w.u32(out);
    in = out;
  }
  for (const auto& t : model.parameters()) w.f32s(t.values);
  return w.take();
}

DetectorModel decode_model(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes, "model");
  if (!r.magic("PATM")) throw FormatError("model: bad magic, expected PATM");
  const std::uint32_t version = r.u32();
  if (version != kModelFormatVersion) {
    throw UnsupportedVersionError("model: unsupported version " + std::to_string(version));
  }
  const std::uint32_t mode = r.u32();
  const std::uint32_t trained = r.u32();
  if (mode > 1) throw FormatError("model: unknown input mode " + std::to_string(mode));
  if (trained > 1) throw FormatError("model: bad trained flag");

  DetectorArchitecture arch;
  arch.input = Shape{r.u32(), r.u32(), r.u32()};
  for (std::uint32_t d : {arch.input.height, arch.input.width, arch.input.channels}) {
    if (d == 0 || d > kMaxDim) throw FormatError("model: input dimension out of range");
  }
  const std::uint32_t layer_count = r.u32();
  if (layer_count == 0 || layer_count > kMaxLayers) {
    throw FormatError("model: layer count " + std::to_string(layer_count) + " out of range");
  }
  std::vector<LayerRecord> layers(layer_count);
  for (auto& l : layers) {
    l.tag = r.u32();
    l.in = r.u32();
    l.out = r.u32();
    if (l.tag != kConvTag && l.tag != kDenseTag) {
      throw FormatError("model: unknown layer tag " + std::to_string(l.tag));
    }
    if (l.in == 0 || l.out == 0 || l.in > kMaxDim * 64 || l.out > kMaxDim) {
      throw FormatError("model: layer dimension out of range");
    }
  }

  bool seen_dense = false;
  std::uint32_t channels = arch.input.channels;
  for (const auto& l : layers) {
    if (l.tag == kConvTag) {
      if (seen_dense) throw FormatError("model: conv block after dense layer");
      if (l.in != channels) throw FormatError("model: conv input channels inconsistent");
      arch.conv_channels.push_back(l.out);
      channels = l.out;
    } else {
      seen_dense = true;
      arch.dense_widths.push_back(l.out);
    }
  }
  try {
    arch.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("model: invalid architecture: ") + e.what());
  }
  std::size_t in = arch.flattened_size();
  for (const auto& l : layers) {
    if (l.tag != kDenseTag) continue;
    if (l.in != in) throw FormatError("model: dense input width inconsistent");
    in = l.out;
  }

  auto shapes = arch.parameter_shapes();
  std::size_t total = 0;
  for (const auto& s : shapes) {
    std::size_t n = 1;
    for (std::size_t d : s) n *= d;
    total += n;
  }
  r.require(4 * total);
  if (r.remaining() != 4 * total) throw FormatError("model: trailing bytes after weights");

  ParameterSet<float> params;
  params.reserve(shapes.size());
  for (auto& s : shapes) {
    std::size_t n = 1;
    for (std::size_t d : s) n *= d;
    Tensor<float> t{std::move(s), std::vector<float>(n)};
    r.f32s(t.values);
    params.push_back(std::move(t));
  }
  return DetectorModel(std::move(arch), static_cast<InputMode>(mode), std::move(params),
                       trained == 1);
}

void save_model(const std::filesystem::path& path, const DetectorModel& model) {
  write_file(path, encode_model(model));
}

DetectorModel load_model(const std::filesystem::path& path) {
  return decode_model(read_file(path));
}

}  // namespace pat
