#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace toffe {

/// H x W grid of {0, 1} cells, row-major.
class BinaryGrid {
 public:
  BinaryGrid() = default;
  BinaryGrid(int height, int width, std::uint8_t fill = 0)
      : height_(height), width_(width), cells_(static_cast<std::size_t>(height) * width, fill ? 1 : 0) {
    if (height < 0 || width < 0) throw std::invalid_argument("BinaryGrid: negative size");
  }

  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return cells_.size(); }

  std::uint8_t operator()(int y, int x) const { return cells_[static_cast<std::size_t>(y) * width_ + x]; }
  void set(int y, int x, bool v) { cells_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0; }
  std::uint8_t operator[](std::size_t i) const { return cells_[i]; }
  void set(std::size_t i, bool v) { cells_[i] = v ? 1 : 0; }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto c : cells_) n += c;
    return n;
  }
  bool same_shape(const BinaryGrid& o) const { return height_ == o.height_ && width_ == o.width_; }
  const std::vector<std::uint8_t>& cells() const { return cells_; }

  friend bool operator==(const BinaryGrid&, const BinaryGrid&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> cells_;
};

}  // namespace toffe
