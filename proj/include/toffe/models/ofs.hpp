#pragma once

#include <cstdint>
#include <vector>

#include "toffe/event/binning.hpp"
#include "toffe/event/grid.hpp"
#include "toffe/neuro/checkpoint.hpp"
#include "toffe/neuro/ops.hpp"
#include "toffe/neuro/tape.hpp"

namespace toffe::models {

struct OfsConfig {
  int in_channels = 2;  // OFF, ON
  int kernel = 5;
  double init_v_th = 1.0;
  double init_leak = 0.9;
  neuro::Surrogate surrogate;
  /// Sharpness of the logistic applied to max_t z in the training loss.
  double logit_scale = 4.0;
};

struct OfsOutput {
  std::vector<BinaryGrid> spikes;  // one grid per time bin
  BinaryGrid aggregate;            // OR over time bins
};

/// Recorded forward pass: membrane drive z and spikes per time bin, and the
/// running max of z, whose sign matches the aggregate output.
struct OfsTrace {
  std::vector<neuro::Var> z;
  std::vector<neuro::Var> spikes;
  neuro::Var z_max;
};

/// Single spiking conv layer (same padding, no bias) of LIF neurons that
/// fires for events of objects moving at or above its speed bin. Time bins of
/// the input volume are fed as successive timesteps.
class OfsModel {
 public:
  OfsModel(int speed_bin, OfsConfig config, std::uint64_t seed);

  int speed_bin() const { return speed_bin_; }
  const OfsConfig& config() const { return config_; }

  OfsOutput forward(const BinnedVolume& volume) const;
  OfsTrace forward(neuro::Tape& tape, const BinnedVolume& volume,
                   neuro::SpikeMode mode = neuro::SpikeMode::Hard);
  /// Per-pixel training logits: logit_scale * max_t z, shaped [1, H, W].
  neuro::Var logits(neuro::Tape& tape, const BinnedVolume& volume);

  std::vector<neuro::Parameter*> parameters() { return {&weight, &v_th, &leak}; }
  void round_to_float();

  neuro::Checkpoint to_checkpoint() const;
  static OfsModel from_checkpoint(const neuro::Checkpoint& ck);

  neuro::Parameter weight;  // [1, in_channels, k, k]
  neuro::Parameter v_th;    // [1], >= 1e-3
  neuro::Parameter leak;    // [1], in [0, 1]

 private:
  void check_input(const BinnedVolume& volume) const;

  int speed_bin_;
  OfsConfig config_;
};

/// Time bin b of a volume as a [2, H, W] tensor of counts.
neuro::Tensor bin_tensor(const BinnedVolume& volume, int bin);

}  // namespace toffe::models
