#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "toffe/event/event.hpp"

namespace toffe {

/// B time bins, each holding an OFF and an ON count plane of H x W cells.
///
/// Storage is bin-major: [bin][channel][row][col]. Channel 0 counts OFF
/// events, channel 1 counts ON events.
class BinnedVolume {
 public:
  BinnedVolume() = default;
  BinnedVolume(int bins, int height, int width, std::uint64_t t_start = 0,
               std::uint64_t dt = 1);

  int bins() const { return bins_; }
  int height() const { return height_; }
  int width() const { return width_; }
  std::uint64_t t_start() const { return t_start_; }
  std::uint64_t dt() const { return dt_; }

  std::uint32_t& at(int bin, int channel, int y, int x) {
    return counts_[index(bin, channel, y, x)];
  }
  std::uint32_t at(int bin, int channel, int y, int x) const {
    return counts_[index(bin, channel, y, x)];
  }

  /// Count plane of one bin and channel, row-major H x W.
  std::span<const std::uint32_t> plane(int bin, int channel) const;
  std::span<std::uint32_t> plane(int bin, int channel);

  const std::vector<std::uint32_t>& counts() const { return counts_; }
  std::uint64_t total() const;
  /// Sum over bins and channels at one pixel.
  std::uint64_t pixel_total(int y, int x) const;
  bool same_shape(const BinnedVolume& other) const;

  friend bool operator==(const BinnedVolume&, const BinnedVolume&) = default;

 private:
  std::size_t index(int bin, int channel, int y, int x) const {
    return ((static_cast<std::size_t>(bin) * 2 + channel) * height_ + y) * width_ + x;
  }

  int bins_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::uint64_t t_start_ = 0;
  std::uint64_t dt_ = 1;
  std::vector<std::uint32_t> counts_;
};

class BinningError : public std::runtime_error {
 public:
  BinningError(const std::string& what, std::size_t event_index)
      : std::runtime_error(what), event_index_(event_index) {}
  std::size_t event_index() const { return event_index_; }

 private:
  std::size_t event_index_;
};

/// Bin index for timestamp t inside [t_start, t_start + dt): floor((t - t_start) * B / dt),
/// clamped to B - 1.
int bin_index(std::uint64_t t, std::uint64_t t_start, std::uint64_t dt, int bins);

/// Accumulates the events falling in the half-open window [t_start, t_start + dt)
/// into a BinnedVolume. Events outside the window are skipped. Throws
/// BinningError naming the first in-window event whose pixel lies off the grid.
BinnedVolume bin_events(std::span<const Event> events, std::uint64_t t_start, std::uint64_t dt,
                        int bins, int height, int width);

/// Sub-range [first, last) of a time-sorted stream that falls inside the window.
std::pair<std::size_t, std::size_t> window_range(std::span<const Event> events,
                                                 std::uint64_t t_start, std::uint64_t dt);

}  // namespace toffe
