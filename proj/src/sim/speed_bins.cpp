#include "toffe/sim/speed_bins.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace toffe {

SpeedBinTable SpeedBinTable::standard() {
  return SpeedBinTable({{1.0, 18.0}, {18.0, 42.0}, {42.0, 84.0}, {84.0, 500.0}}, 144.0);
}

SpeedBinTable::SpeedBinTable(std::vector<SpeedRange> ranges, double programmed_max)
    : ranges_(std::move(ranges)), programmed_max_(programmed_max) {
  if (ranges_.empty()) throw std::invalid_argument("SpeedBinTable: no ranges");
  for (std::size_t i = 0; i < ranges_.size(); ++i) {
    const auto& r = ranges_[i];
    if (!(r.min >= 0.0) || !(r.max > r.min)) {
      throw std::invalid_argument("SpeedBinTable: range " + std::to_string(i + 1) +
                                  " is empty or negative");
    }
    if (i > 0 && ranges_[i - 1].max != r.min) {
      throw std::invalid_argument("SpeedBinTable: range " + std::to_string(i + 1) +
                                  " does not start where the previous one ends");
    }
  }
  if (!(programmed_max_ > ranges_.back().min)) {
    throw std::invalid_argument("SpeedBinTable: programmed max must exceed the top bin minimum");
  }
}

const SpeedRange& SpeedBinTable::range(int bin) const {
  if (bin < 1 || bin > size()) {
    throw std::out_of_range("SpeedBinTable: bin " + std::to_string(bin) + " out of range");
  }
  return ranges_[static_cast<std::size_t>(bin - 1)];
}

double SpeedBinTable::physical_max(int bin) const {
  return std::min(range(bin).max, programmed_max_);
}

double SpeedBinTable::representative_speed(int bin) const {
  return 0.5 * (range(bin).min + physical_max(bin));
}

int speed_to_bin(double speed, const SpeedBinTable& table) {
  if (std::isnan(speed)) throw SpeedOutOfRange("speed_to_bin: NaN speed");
  if (speed < table.ranges().front().min) return 0;
  if (speed >= table.ranges().back().max) {
    throw SpeedOutOfRange("speed_to_bin: " + std::to_string(speed) +
                          " m/s is at or above the top bin limit");
  }
  const auto& r = table.ranges();
  const auto it = std::upper_bound(r.begin(), r.end(), speed,
                                   [](double s, const SpeedRange& range) { return s < range.min; });
  return static_cast<int>(it - r.begin());
}

}  // namespace toffe
