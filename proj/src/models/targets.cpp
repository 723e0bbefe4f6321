#include "toffe/models/targets.hpp"

#include <cmath>
#include <stdexcept>

#include "toffe/models/ofpd.hpp"

namespace toffe::models {

std::vector<std::uint64_t> tile_windows(std::uint64_t t_begin, std::uint64_t t_end, std::uint64_t dt) {
  if (dt == 0) throw std::invalid_argument("tile_windows: dt must be positive");
  std::vector<std::uint64_t> starts;
  for (std::uint64_t t = t_begin; t_end >= dt && t <= t_end - dt; t += dt) starts.push_back(t);
  return starts;
}

const GroundTruthSample& window_ground_truth(const std::vector<GroundTruthSample>& gt, std::uint64_t t_start,
                                             std::uint64_t dt) {
  return ground_truth_near(gt, t_start + dt / 2);
}

EventStream signal_events(std::span<const Event> events, const std::vector<GroundTruthSample>& gt,
                          double radius_px, double margin_px) {
  EventStream out;
  const double reach = radius_px + margin_px;
  for (const Event& e : events) {
    const GroundTruthSample& s = ground_truth_near(gt, e.t);
    const double dx = e.x + 0.5 - s.center_px.x;
    const double dy = e.y + 0.5 - s.center_px.y;
    if (std::hypot(dx, dy) <= reach) out.push_back(e);
  }
  return out;
}

BinaryGrid occupancy(const BinnedVolume& volume) {
  BinaryGrid g(volume.height(), volume.width());
  for (int y = 0; y < volume.height(); ++y) {
    for (int x = 0; x < volume.width(); ++x) {
      if (volume.pixel_total(y, x) > 0) g.set(y, x, true);
    }
  }
  return g;
}

std::vector<OfsExample> build_ofs_targets(const Sequence& sequence, int bin_k, const SpeedBinTable& table,
                                          const WindowConfig& window, double radius_px) {
  const double min_speed = table.range(bin_k).min;
  if (sequence.ground_truth.empty()) throw std::out_of_range("build_ofs_targets: missing ground truth");
  const std::uint64_t t_end = sequence.ground_truth.back().t + 1;
  std::vector<OfsExample> out;
  for (std::uint64_t t0 : tile_windows(0, t_end, window.dt)) {
    const GroundTruthSample& gt = window_ground_truth(sequence.ground_truth, t0, window.dt);
    const auto [first, last] = window_range(sequence.events, t0, window.dt);
    std::span<const Event> in_window(sequence.events.data() + first, last - first);
    OfsExample ex;
    ex.input = bin_events(in_window, t0, window.dt, window.bins, window.height, window.width);
    ex.speed = gt.speed;
    if (gt.speed >= min_speed) {
      const EventStream signal = signal_events(in_window, sequence.ground_truth, radius_px);
      ex.target = occupancy(bin_events(signal, t0, window.dt, window.bins, window.height, window.width));
    } else {
      ex.target = BinaryGrid(window.height, window.width);
    }
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<OfpdExample> build_ofpd_examples(const Sequence& sequence, const WindowConfig& window,
                                             double radius_px, int min_active) {
  if (sequence.ground_truth.empty()) throw std::out_of_range("build_ofpd_examples: missing ground truth");
  const std::uint64_t t_end = sequence.ground_truth.back().t + 1;
  std::vector<OfpdExample> out;
  for (std::uint64_t t0 : tile_windows(0, t_end, window.dt)) {
    const GroundTruthSample& gt = window_ground_truth(sequence.ground_truth, t0, window.dt);
    const auto [first, last] = window_range(sequence.events, t0, window.dt);
    std::span<const Event> in_window(sequence.events.data() + first, last - first);
    const EventStream signal = signal_events(in_window, sequence.ground_truth, radius_px);
    OfpdExample ex;
    ex.input = ofpd_input(bin_events(signal, t0, window.dt, window.bins, window.height, window.width));
    if (active_pixels(ex.input) < min_active) continue;
    ex.center = gt.center_px;
    ex.direction = gt.direction;
    ex.speed_bin = gt.speed_bin;
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace toffe::models
