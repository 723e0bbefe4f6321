#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "toffe/models/ofpd.hpp"
#include "toffe/models/ofs.hpp"
#include "toffe/models/targets.hpp"

namespace toffe::models {

enum class OptimizerKind { Sgd, Adam };

struct TrainConfig {
  int epochs = 10;
  int batch = 16;
  double lr = 0.01;
  OptimizerKind optimizer = OptimizerKind::Adam;
  std::uint64_t seed = 1;
  /// OFS only: loss weight of support pixels that received no event.
  double rim_weight = 0.1;
  /// OFS only: extra loss weight of pixels whose target is 0.
  double negative_weight = 1.0;
};

struct EpochRecord {
  int epoch = 0;  // 0 = before training
  double train_loss = 0.0;
  double val_loss = 0.0;
  double pix_error = 0.0;  // OFPD only, px
  double dir_error = 0.0;  // OFPD only, deg
  double spike_rate = 0.0;  // OFS only, fraction of pixels spiking on validation
};

struct TrainLog {
  std::vector<EpochRecord> epochs;

  double initial_val_loss() const { return epochs.front().val_loss; }
  double final_val_loss() const { return epochs.back().val_loss; }
  double final_train_loss() const { return epochs.back().train_loss; }
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pixels within the kernel reach of any input event: the only pixels whose
/// membrane drive can depend on the input.
BinaryGrid ofs_support(const BinnedVolume& volume, int kernel);

struct OfsLossWeights {
  double rim = 0.1;
  double negative = 1.0;
};

/// Weighted BCE between logit_scale * max_t z and the target: weight 1 on
/// pixels with events, `rim` on the rest of the support, times `negative`
/// where the target is 0.
neuro::Var ofs_loss(neuro::Tape& tape, OfsModel& model, const OfsExample& example, OfsLossWeights weights);
double ofs_loss_value(OfsModel& model, const OfsExample& example, OfsLossWeights weights);

/// Pose MSE on the normalized center plus beta times direction MSE on (cos, sin).
neuro::Var ofpd_loss(neuro::Tape& tape, OfpdModel& model, const OfpdExample& example);

TrainLog train_ofs(OfsModel& model, const std::vector<OfsExample>& train, const std::vector<OfsExample>& val,
                   const TrainConfig& config);
TrainLog train_ofpd(OfpdModel& model, const std::vector<OfpdExample>& train,
                    const std::vector<OfpdExample>& val, const TrainConfig& config);

struct OfpdScore {
  double loss = 0.0;
  double pix_error = 0.0;  // mean px
  double dir_error = 0.0;  // mean deg
};
OfpdScore score_ofpd(OfpdModel& model, const std::vector<OfpdExample>& examples);

void write_training_curve(const std::filesystem::path& path, const TrainLog& log);

}  // namespace toffe::models
