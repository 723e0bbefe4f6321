#pragma once

#include <cstdint>
#include <vector>

#include "toffe/event/binning.hpp"
#include "toffe/event/grid.hpp"
#include "toffe/neuro/checkpoint.hpp"
#include "toffe/neuro/tape.hpp"
#include "toffe/sim/geometry.hpp"

namespace toffe::models {

struct OfpdConfig {
  int height = 64;
  int width = 64;
  int in_channels = 2;  // OFF and ON occupancy of the separated events
  int conv1_channels = 8;
  int conv1_kernel = 5;
  int conv2_channels = 16;
  int conv2_kernel = 3;
  int hidden = 64;
  double beta = 1.0;  // weight of the direction loss
  /// Inputs with fewer active pixels than this are flagged low-confidence.
  int min_active_pixels = 10;
};

struct OfpdPrediction {
  Vec2 center;             // px
  double direction = 0.0;  // rad, [-pi, pi)
  bool low_confidence = false;
};

struct OfpdHeads {
  neuro::Var pose;       // [2], center / (W, H)
  neuro::Var direction;  // [2], (cos, sin)
};

/// Two strided conv layers with ReLU, a fully connected trunk, then a pose
/// head and a direction head.
class OfpdModel {
 public:
  OfpdModel(OfpdConfig config, std::uint64_t seed);

  const OfpdConfig& config() const { return config_; }

  OfpdHeads forward(neuro::Tape& tape, const neuro::Tensor& input);
  OfpdPrediction predict(const neuro::Tensor& input);

  std::vector<neuro::Parameter*> parameters();
  void round_to_float();

  neuro::Checkpoint to_checkpoint() const;
  static OfpdModel from_checkpoint(const neuro::Checkpoint& ck);

  neuro::Parameter conv1_w, conv1_b, conv2_w, conv2_b, fc_w, fc_b, pose_w, pose_b, dir_w, dir_b;

 private:
  OfpdConfig config_;
  neuro::Shape input_shape_;
};

/// [2, H, W] occupancy of the OFF and ON events of a volume, optionally
/// restricted to the cells of `region`.
neuro::Tensor ofpd_input(const BinnedVolume& volume, const BinaryGrid* region = nullptr);

/// Number of pixels with at least one active channel.
int active_pixels(const neuro::Tensor& input);

}  // namespace toffe::models
