#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "toffe/cascade/cascade.hpp"

namespace toffe::io {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct Image {
  int width = 0;
  int height = 0;
  int scale = 1;
  std::vector<Rgb> pixels;

  Image(int w, int h, int s = 1) : width(w * s), height(h * s), scale(s), pixels(static_cast<std::size_t>(width) * height) {}
  Rgb& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Color of a speed bin on the discretized speed wheel, bin 0 for unassigned events.
Rgb bin_color(int bin);

/// Input events in grey, each stage's closed output in its bin color, and an
/// arrow from every detected center along its direction.
Image render_overlay(const BinnedVolume& volume, const CascadeTrace& trace, const std::vector<ObjectFlow>& flows,
                     int close_kernel, int scale = 4);

/// Binary PPM (P6).
void write_ppm(const std::filesystem::path& path, const Image& image);

}  // namespace toffe::io
