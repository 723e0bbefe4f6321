#include "toffe/eval/metrics.hpp"

#include <cmath>

namespace toffe {

double direction_error_deg(double a_rad, double b_rad) {
  double d = std::fmod(std::abs(a_rad - b_rad), 2.0 * kPi);
  if (d > kPi) d = 2.0 * kPi - d;
  return d * 180.0 / kPi;
}

WindowError window_errors(const ObjectFlow& pred, const GroundTruthSample& gt) {
  return {std::hypot(pred.center.x - gt.center_px.x, pred.center.y - gt.center_px.y),
          direction_error_deg(pred.direction, gt.direction), std::abs(pred.representative_speed - gt.speed)};
}

}  // namespace toffe
