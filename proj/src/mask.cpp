#include "latentpara/mask.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

#include "latentpara/errors.hpp"

namespace latentpara {

BinaryMask::BinaryMask(std::size_t width, std::size_t height)
    : width_(width), height_(height), bits_(width * height, 0) {}

BinaryMask::BinaryMask(std::size_t width, std::size_t height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (bits_.size() != width_ * height_) {
    throw DimensionMismatch("BinaryMask: " + std::to_string(bits_.size()) + " bits for " +
                            std::to_string(width_) + "x" + std::to_string(height_));
  }
  for (auto& b : bits_) b = b ? 1 : 0;
}

std::size_t BinaryMask::set_count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<std::uint64_t> rle_encode(const BinaryMask& mask) {
  std::vector<std::uint64_t> runs;
  std::uint8_t current = 0;
  std::uint64_t length = 0;
  for (std::uint8_t b : mask.bits()) {
    if (b == current) {
      ++length;
    } else {
      runs.push_back(length);
      current = b;
      length = 1;
    }
  }
  if (length > 0 || runs.empty()) runs.push_back(length);
  return runs;
}

BinaryMask rle_decode(std::size_t width, std::size_t height, std::span<const std::uint64_t> runs) {
  const std::uint64_t total = std::accumulate(runs.begin(), runs.end(), std::uint64_t{0});
  if (total != static_cast<std::uint64_t>(width) * height) {
    throw std::invalid_argument("rle_decode: runs sum to " + std::to_string(total) +
                                ", expected " + std::to_string(width * height));
  }
  std::vector<std::uint8_t> bits;
  bits.reserve(width * height);
  std::uint8_t value = 0;
  for (std::uint64_t run : runs) {
    bits.insert(bits.end(), run, value);
    value ^= 1;
  }
  return BinaryMask(width, height, std::move(bits));
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DimensionMismatch("mask_iou: " + std::to_string(a.width()) + "x" +
                            std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
                            "x" + std::to_string(b.height()));
  }
  std::size_t inter = 0;
  std::size_t uni = 0;
  const auto& x = a.bits();
  const auto& y = b.bits();
  for (std::size_t i = 0; i < x.size(); ++i) {
    inter += x[i] & y[i];
    uni += x[i] | y[i];
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace latentpara
