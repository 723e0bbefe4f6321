#include "toffe/sim/camera.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace toffe {
namespace {

constexpr double kStarInnerRatio = 0.381966;  // regular pentagram

bool inside_star(double dx, double dy, double r) {
  // Ten-vertex polygon, first tip pointing up (-y), even-odd crossing test.
  std::array<Vec2, 10> v{};
  for (int i = 0; i < 10; ++i) {
    const double rad = (i % 2 == 0) ? r : r * kStarInnerRatio;
    const double a = -kPi / 2.0 + i * kPi / 5.0;
    v[static_cast<std::size_t>(i)] = {rad * std::cos(a), rad * std::sin(a)};
  }
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i].y > dy) != (v[j].y > dy)) {
      const double xc = v[j].x + (dy - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
      if (dx < xc) inside = !inside;
    }
  }
  return inside;
}

bool inside_shape(ShapeKind kind, double dx, double dy, double r) {
  switch (kind) {
    case ShapeKind::Square: return std::abs(dx) <= r && std::abs(dy) <= r;
    case ShapeKind::Circle: return dx * dx + dy * dy <= r * r;
    case ShapeKind::Diamond: return std::abs(dx) + std::abs(dy) <= r;
    case ShapeKind::Star: return inside_star(dx, dy, r);
  }
  return false;
}

}  // namespace

std::string to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::Square: return "square";
    case ShapeKind::Circle: return "circle";
    case ShapeKind::Diamond: return "diamond";
    case ShapeKind::Star: return "star";
  }
  return "?";
}

ShapeKind parse_shape_kind(std::string_view name) {
  for (auto k : {ShapeKind::Square, ShapeKind::Circle, ShapeKind::Diamond, ShapeKind::Star}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown shape '" + std::string(name) + "'");
}

CameraModel CameraModel::with_fov(int width, int height, double horizontal_fov_deg) {
  CameraModel c;
  c.width = width;
  c.height = height;
  c.fx = 0.5 * width / std::tan(0.5 * horizontal_fov_deg * kPi / 180.0);
  c.fy = c.fx;
  c.cx = 0.5 * width;
  c.cy = 0.5 * height;
  return c;
}

void CameraModel::validate() const {
  if (width < 1 || height < 1) throw std::invalid_argument("camera: non-positive resolution");
  if (width > 65535 || height > 65535) throw std::invalid_argument("camera: resolution exceeds 16 bits");
  if (!(fx > 0.0) || !(fy > 0.0)) throw std::invalid_argument("camera: focal lengths must be positive");
  if (!(threshold > 0.0)) throw std::invalid_argument("camera: threshold must be positive");
  if (!(sample_rate > 0.0)) throw std::invalid_argument("camera: sample rate must be positive");
  if (!(foreground > 0.0) || !(background > 0.0)) {
    throw std::invalid_argument("camera: intensities must be positive");
  }
}

std::optional<Vec2> project(const CameraModel& camera, Vec3 p) {
  if (!(p.z > 1e-9)) return std::nullopt;
  return Vec2{camera.cx + camera.fx * p.x / p.z, camera.cy + camera.fy * p.y / p.z};
}

Vec2 project_velocity(const CameraModel& camera, Vec3 p, Vec3 v) {
  const double z2 = p.z * p.z;
  return {camera.fx * (v.x * p.z - p.x * v.z) / z2, camera.fy * (v.y * p.z - p.y * v.z) / z2};
}

double silhouette_radius_px(const Shape& shape, const CameraModel& camera, double depth) {
  const double r = camera.fx * shape.size / depth;
  return shape.kind == ShapeKind::Square ? r * std::sqrt(2.0) : r;
}

IntensityFrame render_intensity(const Shape& shape, Vec3 position, const CameraModel& camera) {
  IntensityFrame frame{camera.width, camera.height,
                       std::vector<double>(static_cast<std::size_t>(camera.width) * camera.height,
                                           camera.background)};
  const auto center = project(camera, position);
  if (!center) return frame;
  const double r = camera.fx * shape.size / position.z;
  const int x0 = std::max(0, static_cast<int>(std::floor(center->x - r - 1.0)));
  const int x1 = std::min(camera.width - 1, static_cast<int>(std::ceil(center->x + r + 1.0)));
  const int y0 = std::max(0, static_cast<int>(std::floor(center->y - r - 1.0)));
  const int y1 = std::min(camera.height - 1, static_cast<int>(std::ceil(center->y + r + 1.0)));
  for (int y = y0; y <= y1; ++y) {
    const double dy = (y + 0.5) - center->y;
    for (int x = x0; x <= x1; ++x) {
      const double dx = (x + 0.5) - center->x;
      if (inside_shape(shape.kind, dx, dy, r)) {
        frame.values[static_cast<std::size_t>(y) * camera.width + x] = camera.foreground;
      }
    }
  }
  return frame;
}

EventStream emit_events(const IntensityFrame& prev, const IntensityFrame& next, std::uint64_t t_us,
                        double threshold) {
  if (prev.width != next.width || prev.height != next.height) {
    throw std::invalid_argument("emit_events: frame shapes differ");
  }
  EventStream events;
  for (int y = 0; y < next.height; ++y) {
    for (int x = 0; x < next.width; ++x) {
      const double a = prev.at(x, y);
      const double b = next.at(x, y);
      if (!(a > 0.0) || !(b > 0.0)) {
        throw std::domain_error("emit_events: non-positive intensity at (" + std::to_string(x) + ", " +
                                std::to_string(y) + ")");
      }
      if (a == b) continue;
      const double change = std::log(b) - std::log(a);
      if (std::abs(change) >= threshold) {
        events.push_back({static_cast<std::uint16_t>(x), static_cast<std::uint16_t>(y), t_us,
                          change > 0.0 ? Polarity::On : Polarity::Off});
      }
    }
  }
  return events;
}

}  // namespace toffe
