#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "toffe/cascade/cascade.hpp"
#include "toffe/eval/metrics.hpp"
#include "toffe/models/targets.hpp"

namespace toffe {

struct CascadeModels {
  std::vector<models::OfsModel> ofs;  // descending bin
  std::optional<models::OfpdModel> ofpd;
};

struct LabeledSequence {
  std::string id;
  Sequence sequence;
};

struct WindowRecord {
  std::string sequence;
  std::uint64_t t_start = 0;
  int gt_bin = 0;
  int pred_bin = 0;  // 0 when nothing was detected
  int detections = 0;
  int spike_pixels = 0;  // summed over cascade stages
  WindowError error;     // valid when pred_bin > 0
};

struct SequenceReport {
  std::string id;
  std::size_t windows = 0;
  std::size_t matched = 0;
  std::size_t correct_bin = 0;
  double pixE = 0.0;
  double dirE = 0.0;
  double speedE = 0.0;
};

/// Means over windows with a detection; bin accuracy over all windows.
struct EvalReport {
  std::uint64_t dt = 0;
  double noise_rate = 0.0;
  std::size_t windows = 0;
  std::size_t matched = 0;
  double pixE = 0.0;
  double dirE = 0.0;
  double speedE = 0.0;
  double bin_accuracy = 0.0;
  double mean_spike_pixels = 0.0;
  std::map<int, std::size_t> detections_per_bin;
  std::vector<SequenceReport> sequences;
  std::vector<WindowRecord> records;
};

/// Classifies each window by its detection with the largest support (ties go
/// to the faster bin) and scores it against the midpoint ground truth.
EvalReport evaluate(const std::vector<LabeledSequence>& sequences, CascadeModels& models,
                    const SpeedBinTable& table, const models::WindowConfig& window,
                    const CascadeConfig& cascade = {});

struct SweepRow {
  std::uint64_t dt = 0;
  double pixE = 0.0;
  double dirE = 0.0;
  double speedE = 0.0;
};

/// One report per dt, each with the models trained for that dt. Throws
/// std::out_of_range for a dt without models.
std::vector<EvalReport> dt_sweep(const std::vector<LabeledSequence>& sequences,
                                 const std::vector<std::uint64_t>& dts,
                                 std::map<std::uint64_t, CascadeModels>& models, const SpeedBinTable& table,
                                 const models::WindowConfig& base, const CascadeConfig& cascade = {});

/// Evaluates copies of the sequences with uniform noise injected at each rate.
std::vector<EvalReport> noise_sweep(const std::vector<LabeledSequence>& sequences,
                                    const std::vector<double>& noise_rates, CascadeModels& models,
                                    const SpeedBinTable& table, const models::WindowConfig& window,
                                    std::uint64_t seed, const CascadeConfig& cascade = {});

SweepRow sweep_row(const EvalReport& report);

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);
void print_sweep(std::ostream& out, const std::vector<SweepRow>& rows);
void write_report_csv(const std::filesystem::path& path, const EvalReport& report);
void write_windows_csv(const std::filesystem::path& path, const EvalReport& report);

}  // namespace toffe
