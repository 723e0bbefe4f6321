#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "toffe/event/event.hpp"
#include "toffe/sim/camera.hpp"
#include "toffe/sim/speed_bins.hpp"
#include "toffe/sim/trajectory.hpp"

namespace toffe {

struct GroundTruthSample {
  std::uint64_t t = 0;  // us
  Vec2 center_px;
  Vec3 velocity;  // m/s, camera frame
  double speed = 0.0;  // |velocity|
  double direction = 0.0;  // image-plane motion angle, [-pi, pi)
  int speed_bin = 0;
};

struct Sequence {
  EventStream events;
  std::vector<GroundTruthSample> ground_truth;
};

struct SequenceSpec {
  Shape shape;
  Trajectory trajectory;
  double duration = 0.05;  // s
  double noise_rate = 0.0;  // events/s
  std::uint64_t seed = 0;
};

GroundTruthSample ground_truth_at(const Trajectory& traj, const CameraModel& camera,
                                  const SpeedBinTable& table, double t_seconds);

/// Samples the scene at the camera rate over [0, duration], emitting events
/// from each consecutive frame pair and logging ground truth for every frame.
Sequence generate_sequence(const SequenceSpec& spec, const CameraModel& camera,
                           const SpeedBinTable& table);

/// Poisson background activity over [t_begin, t_end) us at `rate` events/s,
/// uniform pixels and random polarity, merged into `events` in time order.
void inject_noise(EventStream& events, SensorSize sensor, std::uint64_t t_begin, std::uint64_t t_end,
                  double rate, std::uint64_t seed);

/// Ground-truth sample nearest to `t_us`; throws std::out_of_range when the
/// log does not cover it.
const GroundTruthSample& ground_truth_near(const std::vector<GroundTruthSample>& gt, std::uint64_t t_us);

void write_ground_truth_csv(const std::filesystem::path& path, const std::vector<GroundTruthSample>& gt);
std::vector<GroundTruthSample> read_ground_truth_csv(const std::filesystem::path& path);

}  // namespace toffe
