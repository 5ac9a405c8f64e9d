#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "pat/error.hpp"

namespace pat::detail {

class ByteWriter {
 public:
  void bytes(const char* data, std::size_t n) {
    out_.insert(out_.end(), reinterpret_cast<const std::uint8_t*>(data),
                reinterpret_cast<const std::uint8_t*>(data) + n);
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f32s(std::span<const float> vs) {
    out_.reserve(out_.size() + 4 * vs.size());
    for (float v : vs) f32(v);
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  ByteReader(std::span<const std::uint8_t> data, std::string what)
      : data_(data), what_(std::move(what)) {}

  void require(std::size_t n) const {
    if (remaining() < n) {
      throw TruncatedError(what_ + ": truncated at byte " + std::to_string(pos_) + ", need " +
                           std::to_string(n) + " more");
    }
  }
  [[nodiscard]] std::size_t remaining() const { return data_.size() - pos_; }
  [[nodiscard]] std::size_t position() const { return pos_; }

  bool magic(const char (&tag)[5]) {
    require(4);
    const bool ok = std::memcmp(data_.data() + pos_, tag, 4) == 0;
    pos_ += 4;
    return ok;
  }
  std::uint32_t u32() {
    require(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{data_[pos_ + i]} << (8 * i);
    pos_ += 4;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  void f32s(std::span<float> out) {
    require(4 * out.size());
    for (auto& v : out) v = f32();
  }

 private:
  std::span<const std::uint8_t> data_;
  std::string what_;
  std::size_t pos_ = 0;
};

}  // namespace pat::detail
