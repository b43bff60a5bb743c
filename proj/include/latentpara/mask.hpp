#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace latentpara {

/// Row-major binary grid.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(std::size_t width, std::size_t height);
  BinaryMask(std::size_t width, std::size_t height, std::vector<std::uint8_t> bits);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t pixel_count() const { return bits_.size(); }
  std::size_t set_count() const;

  bool at(std::size_t x, std::size_t y) const { return bits_[y * width_ + x] != 0; }
  void set(std::size_t x, std::size_t y, bool on) { bits_[y * width_ + x] = on ? 1 : 0; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<std::uint8_t> bits_;
};

/// Alternating run lengths of the row-major bit string, zeros first. A mask
/// starting with a set pixel begins with a zero-length run.
std::vector<std::uint64_t> rle_encode(const BinaryMask& mask);

/// Inverse of rle_encode. Throws std::invalid_argument if the runs do not
/// sum to width * height.
BinaryMask rle_decode(std::size_t width, std::size_t height, std::span<const std::uint64_t> runs);

/// |a & b| / |a | b|; 1.0 when both masks are empty. Throws DimensionMismatch.
double mask_iou(const BinaryMask& a, const BinaryMask& b);

}  // namespace latentpara
