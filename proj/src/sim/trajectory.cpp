#include "toffe/sim/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace toffe {
namespace {

constexpr double kTwoPi = 2.0 * kPi;

// Planar polar curve: rho, d rho/ds, phi, d phi/ds, h, d h/ds.
struct Polar {
  double rho, drho, phi, dphi, h, dh;
};

TrajectoryState from_polar(const Polar& c) {
  const double cp = std::cos(c.phi), sp = std::sin(c.phi);
  return {{c.rho * cp, c.rho * sp, c.h},
          {c.drho * cp - c.rho * sp * c.dphi, c.drho * sp + c.rho * cp * c.dphi, c.dh}};
}

TrajectoryState local_curve(TrajectoryKind kind, double r, double s) {
  switch (kind) {
    case TrajectoryKind::Circle:
      return from_polar({r, 0.0, kTwoPi * s, kTwoPi, 0.0, 0.0});
    case TrajectoryKind::VerticalOval: {
      const double a = 2.0 * kTwoPi * s;
      return from_polar({r * (1.0 - 0.2 * std::cos(a)), r * 0.2 * 2.0 * kTwoPi * std::sin(a),
                         kTwoPi * s, kTwoPi, 0.0, 0.0});
    }
    case TrajectoryKind::Test1: {
      const double phi = kTwoPi * s;
      return from_polar({r * (1.0 + 0.12 * std::cos(3.0 * phi)),
                         -r * 0.12 * 3.0 * std::sin(3.0 * phi) * kTwoPi, phi, kTwoPi, 0.0, 0.0});
    }
    case TrajectoryKind::Test2: {
      const double phi = kTwoPi * s;
      return from_polar({r * (1.0 + 0.08 * std::cos(4.0 * phi)),
                         -r * 0.08 * 4.0 * std::sin(4.0 * phi) * kTwoPi, phi, kTwoPi,
                         0.1 * r * std::sin(2.0 * phi), 0.1 * r * 2.0 * std::cos(2.0 * phi) * kTwoPi});
    }
    case TrajectoryKind::Lemniscate: {
      const double q = kTwoPi * s - 0.1 * std::sin(2.0 * kTwoPi * s);
      const double dq = kTwoPi - 0.1 * 2.0 * kTwoPi * std::cos(2.0 * kTwoPi * s);
      return {{r * std::sin(q), 0.5 * r * std::sin(2.0 * q), 0.0},
              {r * std::cos(q) * dq, r * std::cos(2.0 * q) * dq, 0.0}};
    }
  }
  throw std::logic_error("unknown trajectory kind");
}

}  // namespace

std::string to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::Circle: return "circle";
    case TrajectoryKind::Lemniscate: return "lemniscate";
    case TrajectoryKind::VerticalOval: return "vertical-oval";
    case TrajectoryKind::Test1: return "test-1";
    case TrajectoryKind::Test2: return "test-2";
  }
  return "?";
}

TrajectoryKind parse_trajectory_kind(std::string_view name) {
  for (auto k : {TrajectoryKind::Circle, TrajectoryKind::Lemniscate, TrajectoryKind::VerticalOval,
                 TrajectoryKind::Test1, TrajectoryKind::Test2}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown trajectory '" + std::string(name) + "'");
}

std::string to_string(Sense sense) {
  return sense == Sense::Clockwise ? "clockwise" : "anticlockwise";
}

Sense parse_sense(std::string_view name) {
  if (name == "clockwise") return Sense::Clockwise;
  if (name == "anticlockwise") return Sense::Anticlockwise;
  throw std::invalid_argument("unknown sense '" + std::string(name) + "'");
}

TrajectoryState unit_lap_state(const Trajectory& traj, double s) {
  const bool reversed = traj.sense == Sense::Clockwise;
  TrajectoryState c = local_curve(traj.kind, traj.radius, reversed ? -s : s);
  if (reversed) c.velocity = -1.0 * c.velocity;
  const double a = traj.orientation_deg * kPi / 180.0;
  const double ca = std::cos(a), sa = std::sin(a);
  auto rotate = [&](Vec3 v) { return Vec3{ca * v.x - sa * v.y, sa * v.x + ca * v.y, v.z}; };
  return {rotate(c.position), rotate(c.velocity)};
}

TrajectoryState trajectory_state(const Trajectory& traj, double t) {
  if (std::isinf(traj.lap_time)) {
    return {traj.center + unit_lap_state(traj, traj.phase).position, {}};
  }
  const double s = std::fmod(t / traj.lap_time + traj.phase, 1.0);
  const TrajectoryState unit = unit_lap_state(traj, s);
  return {traj.center + unit.position, (1.0 / traj.lap_time) * unit.velocity};
}

LapTimeFit fit_lap_time(const Trajectory& traj, int bin, const SpeedBinTable& table, int samples) {
  std::vector<double> unit_speed(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    unit_speed[static_cast<std::size_t>(i)] =
        norm(unit_lap_state(traj, static_cast<double>(i) / samples).velocity);
  }
  const auto [lo_it, hi_it] = std::minmax_element(unit_speed.begin(), unit_speed.end());
  const double umin = *lo_it, umax = *hi_it;
  double umean = 0.0;
  for (double u : unit_speed) umean += u;
  umean /= samples;

  const double lo = table.range(bin).min;
  const double hi = table.physical_max(bin);
  double lap = umean / table.representative_speed(bin);
  // Feasible lap times keep umin/lap >= lo and umax/lap < hi.
  const double lap_longest = umin / lo;
  const double lap_shortest = umax / hi;
  if (lap_shortest < lap_longest) {
    const double margin = 1.0 + 0.25 * (lap_longest / lap_shortest - 1.0);
    lap = std::clamp(lap, lap_shortest * std::min(margin, 1.02), lap_longest / std::min(margin, 1.02));
  } else {
    lap = std::sqrt(lap_longest * lap_shortest);
  }

  LapTimeFit fit;
  fit.lap_time = lap;
  fit.min_speed = umin / lap;
  fit.max_speed = umax / lap;
  fit.mean_speed = umean / lap;
  int outside = 0;
  for (double u : unit_speed) {
    const double v = u / lap;
    if (v < lo || v >= table.range(bin).max) ++outside;
  }
  fit.fraction_outside = static_cast<double>(outside) / samples;
  return fit;
}

}  // namespace toffe
