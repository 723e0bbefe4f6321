#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "toffe/event/event.hpp"
#include "toffe/sim/geometry.hpp"

namespace toffe {

enum class ShapeKind { Square, Circle, Diamond, Star };

std::string to_string(ShapeKind kind);
ShapeKind parse_shape_kind(std::string_view name);

struct Shape {
  ShapeKind kind = ShapeKind::Square;
  double size = 0.0225;  // half-extent, m
};

/// Pinhole event camera. Pixel (col, row) covers [col, col+1) x [row, row+1);
/// its center sits at (col + 0.5, row + 0.5).
struct CameraModel {
  int width = 64;
  int height = 64;
  double fx = 55.4256;
  double fy = 55.4256;
  double cx = 32.0;
  double cy = 32.0;
  double threshold = 0.2;  // log-intensity contrast
  double sample_rate = 20000.0;  // frames/s
  double foreground = 200.0;
  double background = 50.0;

  /// Square-pixel camera with the principal point at the image center.
  static CameraModel with_fov(int width, int height, double horizontal_fov_deg);
  void validate() const;
};

/// Image-plane position of a camera-frame point; empty when the point is not
/// in front of the camera.
std::optional<Vec2> project(const CameraModel& camera, Vec3 point);

/// Time derivative of the projected position for a point moving with `velocity`.
Vec2 project_velocity(const CameraModel& camera, Vec3 point, Vec3 velocity);

/// Largest distance from the projected center to the silhouette boundary, px.
double silhouette_radius_px(const Shape& shape, const CameraModel& camera, double depth);

struct IntensityFrame {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // row-major

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// Binary silhouette render: pixels whose center falls inside the projected
/// shape get the foreground intensity, everything else background.
IntensityFrame render_intensity(const Shape& shape, Vec3 position, const CameraModel& camera);

/// One event per pixel whose log intensity changed by at least `threshold`
/// between the two frames, stamped `t_us`, emitted in row-major order.
EventStream emit_events(const IntensityFrame& prev, const IntensityFrame& next, std::uint64_t t_us,
                        double threshold);

}  // namespace toffe
