#include "toffe/cascade/morphology.hpp"

#include <stdexcept>

namespace toffe {

BinaryGrid close(const BinaryGrid& g, int k) {
  if (k <= 0 || k % 2 == 0) throw std::invalid_argument("close: kernel size must be odd and positive");
  const int h = g.height(), w = g.width(), r = k / 2;
  // Dilation on the grid padded by r on every side.
  const int ph = h + 2 * r, pw = w + 2 * r;
  std::vector<std::uint8_t> dil(static_cast<std::size_t>(ph) * pw, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!g(y, x)) continue;
      for (int dy = 0; dy < k; ++dy)
        for (int dx = 0; dx < k; ++dx) dil[static_cast<std::size_t>(y + dy) * pw + (x + dx)] = 1;
    }
  }
  BinaryGrid out(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      bool all = true;
      for (int dy = 0; dy < k && all; ++dy)
        for (int dx = 0; dx < k && all; ++dx) all = dil[static_cast<std::size_t>(y + dy) * pw + (x + dx)];
      out.set(y, x, all);
    }
  }
  return out;
}

BinaryGrid make_mask(const BinaryGrid& out, int k) {
  BinaryGrid closed = close(out, k);
  for (std::size_t i = 0; i < closed.size(); ++i) closed.set(i, !closed[i]);
  return closed;
}

BinnedVolume apply_mask(const BinnedVolume& input, const BinaryGrid& mask) {
  if (mask.height() != input.height() || mask.width() != input.width()) {
    throw std::invalid_argument("apply_mask: mask shape differs from volume");
  }
  BinnedVolume out = input;
  for (int b = 0; b < out.bins(); ++b) {
    for (int c = 0; c < 2; ++c) {
      auto plane = out.plane(b, c);
      for (std::size_t i = 0; i < plane.size(); ++i) {
        if (!mask[i]) plane[i] = 0;
      }
    }
  }
  return out;
}

}  // namespace toffe
