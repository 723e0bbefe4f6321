#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "toffe/eval/evaluate.hpp"
#include "toffe/io/config.hpp"
#include "toffe/io/dataset.hpp"
#include "toffe/models/train.hpp"

namespace toffe::io {

struct Overrides {
  std::optional<double> scale;
  std::optional<int> bin;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> dt;
};

void apply_overrides(RunConfig& config, const Overrides& overrides);

/// Checkpoints for one window length live in <models_dir>/dt<dt>/.
std::filesystem::path model_dir(const RunConfig& config, std::uint64_t dt);
std::filesystem::path ofs_checkpoint_path(const RunConfig& config, std::uint64_t dt, int bin);
std::filesystem::path ofpd_checkpoint_path(const RunConfig& config, std::uint64_t dt);

Manifest cmd_gen(const RunConfig& config);

struct OfsTrainResult {
  models::OfsModel model;
  models::TrainLog log;
};
struct OfpdTrainResult {
  models::OfpdModel model;
  models::TrainLog log;
};

/// Training examples of the manifest's fitting or validation split, taking
/// every window_stride-th window of each sequence.
std::vector<models::OfsExample> ofs_examples(const RunConfig& config, const std::vector<LabeledSequence>& seqs,
                                             int bin, int stride);
std::vector<models::OfpdExample> ofpd_examples(const RunConfig& config, const std::vector<LabeledSequence>& seqs,
                                               int stride);

/// Trains the OFS model of one bin (or of every bin) at config.window.dt and
/// writes checkpoints and training curves.
std::vector<OfsTrainResult> cmd_train_ofs(const RunConfig& config, std::optional<int> bin, std::ostream* log = nullptr);
OfpdTrainResult cmd_train_ofpd(const RunConfig& config, std::ostream* log = nullptr);

/// OFS models in descending bin order plus the OFPD model for one dt.
CascadeModels load_models(const RunConfig& config, std::uint64_t dt);

/// Cascade inference over every test sequence (or the configured event file):
/// one CSV per stream with a row per (window, detected bin). Returns the
/// number of rows written.
std::size_t cmd_infer(const RunConfig& config, std::ostream* log = nullptr);

/// Test-split evaluation at config.window.dt.
EvalReport cmd_eval(const RunConfig& config, std::ostream* log = nullptr);

/// Names of the configured thresholds the report violates.
std::vector<std::string> threshold_violations(const EvalConfig& eval, const EvalReport& report);

struct SweepResult {
  std::vector<EvalReport> dt_reports;
  std::vector<EvalReport> noise_reports;
};

/// dt sweep over eval.dts and noise sweep over eval.noise_rates at window.dt.
SweepResult cmd_sweep(const RunConfig& config, std::ostream* log = nullptr);

/// Published reference row at dt = 500 us.
inline constexpr SweepRow kReferenceDt500{500, 5.355, 10.769, 10.649};

}  // namespace toffe::io
