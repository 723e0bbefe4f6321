#pragma once

#include <limits>
#include <stdexcept>
#include <vector>

namespace toffe {

struct SpeedRange {
  double min = 0.0;  // m/s, inclusive
  double max = 0.0;  // m/s, exclusive
};

/// Contiguous speed ranges; bin indices are 1-based, 0 means "below bin 1".
class SpeedBinTable {
 public:
  /// The four ranges 1-18, 18-42, 42-84, 84-500 m/s with a programmed
  /// maximum object speed of 144 m/s.
  static SpeedBinTable standard();

  explicit SpeedBinTable(std::vector<SpeedRange> ranges,
                         double programmed_max = std::numeric_limits<double>::infinity());

  int size() const { return static_cast<int>(ranges_.size()); }
  const SpeedRange& range(int bin) const;
  const std::vector<SpeedRange>& ranges() const { return ranges_; }
  double programmed_max() const { return programmed_max_; }

  /// Upper edge used for physical speeds: min(range.max, programmed_max).
  double physical_max(int bin) const;
  /// Midpoint of [range.min, physical_max].
  double representative_speed(int bin) const;

 private:
  std::vector<SpeedRange> ranges_;
  double programmed_max_;
};

class SpeedOutOfRange : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Lower-inclusive lookup. Speeds below the first range map to 0; speeds at
/// or above the top range's max throw SpeedOutOfRange.
int speed_to_bin(double speed, const SpeedBinTable& table);

}  // namespace toffe
