#include "toffe/io/overlay.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "toffe/cascade/morphology.hpp"

namespace toffe::io {

Rgb bin_color(int bin) {
  static const std::array<Rgb, 5> colors{{{140, 140, 140}, {40, 90, 255}, {40, 200, 80}, {255, 190, 0}, {235, 40, 40}}};
  return colors[static_cast<std::size_t>(std::clamp(bin, 0, 4))];
}

namespace {

void fill_cell(Image& img, int x, int y, Rgb c) {
  for (int dy = 0; dy < img.scale; ++dy)
    for (int dx = 0; dx < img.scale; ++dx) img.at(x * img.scale + dx, y * img.scale + dy) = c;
}

void draw_line(Image& img, double x0, double y0, double x1, double y1, Rgb c) {
  const int steps = static_cast<int>(std::ceil(std::hypot(x1 - x0, y1 - y0))) + 1;
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    const int x = static_cast<int>(std::floor(x0 + t * (x1 - x0)));
    const int y = static_cast<int>(std::floor(y0 + t * (y1 - y0)));
    if (x >= 0 && y >= 0 && x < img.width && y < img.height) img.at(x, y) = c;
  }
}

}  // namespace

Image render_overlay(const BinnedVolume& volume, const CascadeTrace& trace, const std::vector<ObjectFlow>& flows,
                     int close_kernel, int scale) {
  Image img(volume.width(), volume.height(), scale);
  for (int y = 0; y < volume.height(); ++y)
    for (int x = 0; x < volume.width(); ++x)
      if (volume.pixel_total(y, x) > 0) fill_cell(img, x, y, bin_color(0));
  for (const CascadeStage& st : trace.stages) {
    const BinaryGrid closed = close(st.output, close_kernel);
    for (int y = 0; y < volume.height(); ++y)
      for (int x = 0; x < volume.width(); ++x)
        if (closed(y, x) && st.input.pixel_total(y, x) > 0) fill_cell(img, x, y, bin_color(st.bin));
  }
  const Rgb white{255, 255, 255};
  for (const ObjectFlow& f : flows) {
    const double cx = f.center.x * scale, cy = f.center.y * scale;
    const double len = 8.0 * scale;
    const double tx = cx + len * std::cos(f.direction), ty = cy + len * std::sin(f.direction);
    draw_line(img, cx, cy, tx, ty, white);
    for (double side : {-1.0, 1.0}) {
      const double a = f.direction + kPi + side * 0.5;
      draw_line(img, tx, ty, tx + 0.35 * len * std::cos(a), ty + 0.35 * len * std::sin(a), white);
    }
  }
  return img;
}

void write_ppm(const std::filesystem::path& path, const Image& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  for (const Rgb& p : image.pixels) {
    const char rgb[3] = {static_cast<char>(p.r), static_cast<char>(p.g), static_cast<char>(p.b)};
    out.write(rgb, 3);
  }
}

}  // namespace toffe::io
