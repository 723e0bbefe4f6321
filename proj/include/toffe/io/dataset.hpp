#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "toffe/eval/evaluate.hpp"
#include "toffe/io/config.hpp"
#include "toffe/sim/sequence.hpp"

namespace toffe::io {

struct SequenceEntry {
  std::string id;
  std::string split;  // "train" or "test"
  int bin = 0;
  ShapeKind shape = ShapeKind::Square;
  TrajectoryKind trajectory = TrajectoryKind::Circle;
  Sense sense = Sense::Anticlockwise;
  double orientation_deg = 0.0;
  double lap_time = 0.0;  // s
  double phase = 0.0;
  std::uint64_t seed = 0;
  std::string events_file;  // relative to the dataset directory
  std::string gt_file;
};

struct Manifest {
  std::uint64_t seed = 0;
  double scale = 1.0;
  int width = 0;
  int height = 0;
  std::vector<SequenceEntry> sequences;

  std::vector<SequenceEntry> split(const std::string& name) const;
};

/// Factorial design. Train: bins x senses x orientations x train trajectories
/// x shapes. Test: bins x senses x test trajectories x shapes at 0 degrees.
/// With scale < 1, each (split, bin, trajectory, shape) group keeps
/// max(1, round(scale * n)) of its n members, picked by a seeded shuffle.
std::vector<SequenceEntry> plan_dataset(const RunConfig& config);

SequenceSpec sequence_spec(const RunConfig& config, const SequenceEntry& entry);

/// Writes events/<id>.tofe, gt/<id>.csv, manifest.ini and config.ini into `dir`.
Manifest generate_dataset(const RunConfig& config, const std::filesystem::path& dir);

Manifest load_manifest(const std::filesystem::path& dir);
LabeledSequence load_sequence(const std::filesystem::path& dir, const SequenceEntry& entry);
std::vector<LabeledSequence> load_sequences(const std::filesystem::path& dir,
                                            const std::vector<SequenceEntry>& entries);

/// Training entries split into fitting and validation sets: every n-th
/// training entry is held out.
struct TrainSplit {
  std::vector<SequenceEntry> fit;
  std::vector<SequenceEntry> validation;
};
TrainSplit split_training(const Manifest& manifest, int validation_every);

}  // namespace toffe::io
