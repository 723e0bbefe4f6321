#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "toffe/cascade/cascade.hpp"
#include "toffe/models/ofpd.hpp"
#include "toffe/models/ofs.hpp"
#include "toffe/models/targets.hpp"
#include "toffe/models/train.hpp"
#include "toffe/sim/camera.hpp"
#include "toffe/sim/speed_bins.hpp"
#include "toffe/sim/trajectory.hpp"

namespace toffe::io {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DatasetConfig {
  std::filesystem::path path = "data";
  double duration = 0.04;  // s per sequence
  double scale = 1.0;
  double noise_rate = 0.0;  // events/s
  double shape_size = 0.0225;
  double radius = 0.09;
  double depth = 0.25;
  std::vector<ShapeKind> shapes{ShapeKind::Square, ShapeKind::Circle, ShapeKind::Diamond, ShapeKind::Star};
  std::vector<TrajectoryKind> train_trajectories{TrajectoryKind::Circle, TrajectoryKind::VerticalOval,
                                                 TrajectoryKind::Lemniscate};
  std::vector<TrajectoryKind> test_trajectories{TrajectoryKind::Test1, TrajectoryKind::Test2};
  std::vector<double> orientations{0.0, 45.0, 90.0, 145.0};
  std::vector<Sense> senses{Sense::Anticlockwise, Sense::Clockwise};
  /// Every n-th training sequence is held out for validation.
  int validation_every = 8;
  /// Training windows are taken with this stride (1 = every window).
  int window_stride = 1;
};

struct EvalConfig {
  std::vector<std::uint64_t> dts{500, 1000, 5000};
  std::vector<double> noise_rates{0.0, 1000.0};
  std::filesystem::path output = "out";
  /// Event file for `infer`; empty means every test sequence of the dataset.
  std::filesystem::path infer_events;
  bool overlays = false;
  // Thresholds checked by `eval`; unset ones are not checked.
  std::optional<double> min_accuracy;
  std::optional<double> max_pixE;
  std::optional<double> max_dirE;
  std::optional<double> max_speedE;
};

struct RunConfig {
  CameraModel camera;
  double fov_deg = 60.0;
  SpeedBinTable table = SpeedBinTable::standard();
  models::WindowConfig window;
  DatasetConfig dataset;
  models::OfsConfig ofs;
  models::TrainConfig ofs_train;
  models::OfpdConfig ofpd;
  models::TrainConfig ofpd_train;
  CascadeConfig cascade;
  EvalConfig eval;
  std::filesystem::path models_dir = "models";
  std::uint64_t seed = 1;
  /// Text the config was parsed from, stored next to outputs.
  std::string source;
};

/// Parses INI text. Every key is optional; unknown sections or keys and
/// malformed values raise ConfigError. Relative paths stay relative.
RunConfig parse_config(const std::string& text);

/// Reads and parses a config file; relative paths are resolved against the
/// file's directory.
RunConfig load_config(const std::filesystem::path& path);

/// The documented defaults as INI text.
std::string default_config_text();

}  // namespace toffe::io
