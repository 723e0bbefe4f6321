#include "toffe/sim/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "toffe/sim/random.hpp"

namespace toffe {

GroundTruthSample ground_truth_at(const Trajectory& traj, const CameraModel& camera,
                                  const SpeedBinTable& table, double t_seconds) {
  const TrajectoryState state = trajectory_state(traj, t_seconds);
  GroundTruthSample s;
  s.t = static_cast<std::uint64_t>(std::llround(t_seconds * 1e6));
  const auto center = project(camera, state.position);
  if (!center) throw std::domain_error("ground_truth_at: object is behind the camera");
  s.center_px = *center;
  s.velocity = state.velocity;
  s.speed = norm(state.velocity);
  const Vec2 image_velocity = project_velocity(camera, state.position, state.velocity);
  s.direction = wrap_angle(std::atan2(image_velocity.y, image_velocity.x));
  s.speed_bin = speed_to_bin(s.speed, table);
  return s;
}

void inject_noise(EventStream& events, SensorSize sensor, std::uint64_t t_begin, std::uint64_t t_end,
                  double rate, std::uint64_t seed) {
  if (!(rate > 0.0) || t_end <= t_begin) return;
  Rng rng(seed);
  EventStream noise;
  double t = static_cast<double>(t_begin);
  for (;;) {
    t += rng.exponential(rate) * 1e6;
    if (t >= static_cast<double>(t_end)) break;
    Event e;
    e.t = static_cast<std::uint64_t>(t);
    e.x = static_cast<std::uint16_t>(rng.below(static_cast<std::uint64_t>(sensor.width)));
    e.y = static_cast<std::uint16_t>(rng.below(static_cast<std::uint64_t>(sensor.height)));
    e.p = rng.uniform() < 0.5 ? Polarity::Off : Polarity::On;
    noise.push_back(e);
  }
  EventStream merged;
  merged.reserve(events.size() + noise.size());
  std::merge(events.begin(), events.end(), noise.begin(), noise.end(), std::back_inserter(merged),
             [](const Event& a, const Event& b) { return a.t < b.t; });
  events = std::move(merged);
}

Sequence generate_sequence(const SequenceSpec& spec, const CameraModel& camera,
                           const SpeedBinTable& table) {
  camera.validate();
  if (!(spec.duration > 0.0)) throw std::invalid_argument("generate_sequence: duration must be positive");
  const auto frames = static_cast<std::int64_t>(std::llround(spec.duration * camera.sample_rate));
  Sequence seq;
  seq.ground_truth.reserve(static_cast<std::size_t>(frames) + 1);

  IntensityFrame prev;
  for (std::int64_t k = 0; k <= frames; ++k) {
    const double t = static_cast<double>(k) / camera.sample_rate;
    const TrajectoryState state = trajectory_state(spec.trajectory, t);
    GroundTruthSample gt = ground_truth_at(spec.trajectory, camera, table, t);
    IntensityFrame frame = render_intensity(spec.shape, state.position, camera);
    if (k > 0) {
      EventStream step = emit_events(prev, frame, gt.t, camera.threshold);
      seq.events.insert(seq.events.end(), step.begin(), step.end());
    }
    seq.ground_truth.push_back(gt);
    prev = std::move(frame);
  }
  if (spec.noise_rate > 0.0) {
    inject_noise(seq.events, {camera.width, camera.height}, 0, seq.ground_truth.back().t + 1,
                 spec.noise_rate, spec.seed);
  }
  return seq;
}

const GroundTruthSample& ground_truth_near(const std::vector<GroundTruthSample>& gt, std::uint64_t t_us) {
  if (gt.empty()) throw std::out_of_range("ground truth log is empty");
  const std::uint64_t spacing = gt.size() > 1 ? gt[1].t - gt[0].t : 0;
  if (t_us + spacing / 2 < gt.front().t || t_us > gt.back().t + spacing / 2) {
    throw std::out_of_range("no ground truth near t=" + std::to_string(t_us) + " us");
  }
  auto it = std::lower_bound(gt.begin(), gt.end(), t_us,
                             [](const GroundTruthSample& s, std::uint64_t t) { return s.t < t; });
  if (it == gt.end()) return gt.back();
  if (it != gt.begin()) {
    auto before = std::prev(it);
    if (t_us - before->t < it->t - t_us) return *before;
  }
  return *it;
}

void write_ground_truth_csv(const std::filesystem::path& path, const std::vector<GroundTruthSample>& gt) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "t_us,cx_px,cy_px,vx,vy,vz,speed,dir_rad,bin\n";
  for (const auto& s : gt) {
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", s.t, s.center_px.x, s.center_px.y, s.velocity.x,
                       s.velocity.y, s.velocity.z, s.speed, s.direction, s.speed_bin);
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::vector<GroundTruthSample> read_ground_truth_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("t_us,", 0) != 0) {
    throw std::runtime_error(path.string() + ": missing ground-truth header");
  }
  std::vector<GroundTruthSample> gt;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string f[9];
    for (auto& field : f) {
      if (!std::getline(fields, field, ',')) {
        throw std::runtime_error(path.string() + ": short ground-truth row");
      }
    }
    GroundTruthSample s;
    s.t = std::stoull(f[0]);
    s.center_px = {std::stod(f[1]), std::stod(f[2])};
    s.velocity = {std::stod(f[3]), std::stod(f[4]), std::stod(f[5])};
    s.speed = std::stod(f[6]);
    s.direction = std::stod(f[7]);
    s.speed_bin = std::stoi(f[8]);
    gt.push_back(s);
  }
  return gt;
}

}  // namespace toffe
