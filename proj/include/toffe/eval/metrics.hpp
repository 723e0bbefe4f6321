#pragma once

#include "toffe/cascade/cascade.hpp"
#include "toffe/sim/sequence.hpp"

namespace toffe {

struct WindowError {
  double pix = 0.0;    // px
  double dir = 0.0;    // deg, [0, 180]
  double speed = 0.0;  // m/s
};

/// Absolute angular difference in degrees, wrapped to [0, 180].
double direction_error_deg(double a_rad, double b_rad);

WindowError window_errors(const ObjectFlow& pred, const GroundTruthSample& gt);

}  // namespace toffe
