#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "toffe/event/binning.hpp"
#include "toffe/event/grid.hpp"
#include "toffe/neuro/tensor.hpp"
#include "toffe/sim/sequence.hpp"
#include "toffe/sim/speed_bins.hpp"

namespace toffe::models {

struct WindowConfig {
  std::uint64_t dt = 500;  // us
  int bins = 5;
  int height = 64;
  int width = 64;
};

/// Start times of the full windows [t0, t0 + dt) tiling [t_begin, t_end).
std::vector<std::uint64_t> tile_windows(std::uint64_t t_begin, std::uint64_t t_end, std::uint64_t dt);

/// Midpoint ground truth of the window starting at t_start.
const GroundTruthSample& window_ground_truth(const std::vector<GroundTruthSample>& gt, std::uint64_t t_start,
                                             std::uint64_t dt);

/// Events lying within radius_px + margin_px of the object center at their own
/// timestamp. Throws std::out_of_range if ground truth does not cover an event.
EventStream signal_events(std::span<const Event> events, const std::vector<GroundTruthSample>& gt,
                          double radius_px, double margin_px = 1.5);

/// Pixels that received any event of the volume.
BinaryGrid occupancy(const BinnedVolume& volume);

struct OfsExample {
  BinnedVolume input;
  BinaryGrid target;
  double speed = 0.0;  // ground truth at the window midpoint
};

/// One example per window: the full binned input, and as target the signal
/// occupancy when the midpoint speed reaches the minimum of bin_k, otherwise
/// an empty grid.
std::vector<OfsExample> build_ofs_targets(const Sequence& sequence, int bin_k, const SpeedBinTable& table,
                                          const WindowConfig& window, double radius_px);

struct OfpdExample {
  neuro::Tensor input;   // [2, H, W] occupancy of signal events
  Vec2 center;           // px
  double direction = 0;  // rad
  int speed_bin = 0;
};

/// Windows whose signal occupancy covers at least min_active pixels.
std::vector<OfpdExample> build_ofpd_examples(const Sequence& sequence, const WindowConfig& window,
                                             double radius_px, int min_active = 1);

}  // namespace toffe::models
