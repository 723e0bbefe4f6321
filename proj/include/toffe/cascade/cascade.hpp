#pragma once

#include <vector>

#include "toffe/event/binning.hpp"
#include "toffe/event/grid.hpp"
#include "toffe/models/ofpd.hpp"
#include "toffe/models/ofs.hpp"
#include "toffe/sim/geometry.hpp"
#include "toffe/sim/speed_bins.hpp"

namespace toffe {

struct ObjectFlow {
  Vec2 center;             // px
  double direction = 0.0;  // rad, [-pi, pi)
  int speed_bin = 0;
  double representative_speed = 0.0;  // m/s
  int support = 0;                    // spike pixels of out_k
};

struct CascadeConfig {
  int close_kernel = 5;
  int min_support = 10;
};

struct CascadeStage {
  int bin = 0;
  BinnedVolume input;  // inp_k
  BinaryGrid output;   // out_k
};

/// Stages in evaluation order, fastest bin first.
struct CascadeTrace {
  std::vector<CascadeStage> stages;
};

class CascadeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Runs the OFS models from the fastest bin to the slowest, masking out the
/// closed output of each stage before the next, then estimates pose and
/// direction for every stage whose output support reaches min_support.
/// `ofs` must be ordered by strictly descending speed bin. Results are sorted
/// by ascending bin.
std::vector<ObjectFlow> cascade_infer(const BinnedVolume& volume, const std::vector<models::OfsModel>& ofs,
                                      models::OfpdModel& ofpd, const SpeedBinTable& table,
                                      const CascadeConfig& config = {}, CascadeTrace* trace = nullptr);

}  // namespace toffe
