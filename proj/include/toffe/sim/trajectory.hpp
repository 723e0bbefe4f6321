#pragma once

#include <string>
#include <string_view>

#include "toffe/sim/geometry.hpp"
#include "toffe/sim/speed_bins.hpp"

namespace toffe {

enum class TrajectoryKind { Circle, Lemniscate, VerticalOval, Test1, Test2 };
enum class Sense { Anticlockwise, Clockwise };

std::string to_string(TrajectoryKind kind);
TrajectoryKind parse_trajectory_kind(std::string_view name);
std::string to_string(Sense sense);
Sense parse_sense(std::string_view name);

/// A closed path traced once per lap in a plane facing the camera.
///
/// World frame is the camera frame: x right, y down, z along the optical axis.
/// The path lives in cylindrical coordinates about an axis through `center`
/// parallel to z: radius profile rho(s), angle phi(s) and height h(s) over the
/// lap parameter s = t / lap_time. `orientation_deg` rotates the path about the
/// axis; `sense` selects the direction of travel.
///
///   circle         rho = R,                        phi = 2 pi s,  h = 0
///   vertical-oval  rho = R (1 - 0.2 cos 4 pi s),   phi = 2 pi s,  h = 0
///   test-1         rho = R (1 + 0.12 cos 3 phi),   phi = 2 pi s,  h = 0
///   test-2         rho = R (1 + 0.08 cos 4 phi),   phi = 2 pi s,  h = 0.1 R sin 2 phi
///   lemniscate     figure eight x = R sin q, y = (R/2) sin 2q with
///                  q = 2 pi s - 0.1 sin 4 pi s; rho = |(x, y)| collapses to 0 at the
///                  crossing, so it is evaluated in the plane directly.
///
/// The lap starts at s = phase. An infinite lap time gives a static object
/// parked there.
struct Trajectory {
  TrajectoryKind kind = TrajectoryKind::Circle;
  double radius = 0.09;  // m
  double lap_time = 1.0;  // s
  double orientation_deg = 0.0;
  Sense sense = Sense::Anticlockwise;
  double phase = 0.0;  // lap fraction at t = 0, [0, 1)
  Vec3 center{0.0, 0.0, 0.25};
};

struct TrajectoryState {
  Vec3 position;  // m
  Vec3 velocity;  // m/s
};

TrajectoryState trajectory_state(const Trajectory& traj, double t);

/// Position and d(position)/ds for a unit lap, in the rotated trajectory frame
/// relative to the center. Exposed for lap-time fitting and tests.
TrajectoryState unit_lap_state(const Trajectory& traj, double s);

struct LapTimeFit {
  double lap_time = 0.0;
  double min_speed = 0.0;
  double max_speed = 0.0;
  double mean_speed = 0.0;
  /// Fraction of uniformly sampled lap positions whose speed falls outside the bin.
  double fraction_outside = 0.0;
};

/// Chooses the lap time for `traj` so that its mean speed sits at the bin's
/// representative speed, then nudges it so the whole speed profile stays
/// inside [min, physical_max) when the profile is narrow enough to fit.
LapTimeFit fit_lap_time(const Trajectory& traj, int bin, const SpeedBinTable& table,
                        int samples = 4096);

}  // namespace toffe
