#include "toffe/event/binning.hpp"

#include <algorithm>
#include <numeric>

#include <string>

namespace toffe {

bool is_time_sorted(const EventStream& events) {
  return std::is_sorted(events.begin(), events.end(),
                        [](const Event& a, const Event& b) { return a.t < b.t; });
}

BinnedVolume::BinnedVolume(int bins, int height, int width, std::uint64_t t_start,
                           std::uint64_t dt)
    : bins_(bins), height_(height), width_(width), t_start_(t_start), dt_(dt) {
  if (bins < 1 || height < 1 || width < 1) {
    throw std::invalid_argument("BinnedVolume: bins, height and width must be positive");
  }
  if (dt == 0) throw std::invalid_argument("BinnedVolume: dt must be positive");
  counts_.assign(static_cast<std::size_t>(bins) * 2 * height * width, 0);
}

std::span<const std::uint32_t> BinnedVolume::plane(int bin, int channel) const {
  const std::size_t n = static_cast<std::size_t>(height_) * width_;
  return {counts_.data() + index(bin, channel, 0, 0), n};
}

std::span<std::uint32_t> BinnedVolume::plane(int bin, int channel) {
  const std::size_t n = static_cast<std::size_t>(height_) * width_;
  return {counts_.data() + index(bin, channel, 0, 0), n};
}

std::uint64_t BinnedVolume::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::uint64_t BinnedVolume::pixel_total(int y, int x) const {
  std::uint64_t sum = 0;
  for (int b = 0; b < bins_; ++b) {
    sum += at(b, 0, y, x) + at(b, 1, y, x);
  }
  return sum;
}

bool BinnedVolume::same_shape(const BinnedVolume& other) const {
  return bins_ == other.bins_ && height_ == other.height_ && width_ == other.width_;
}

int bin_index(std::uint64_t t, std::uint64_t t_start, std::uint64_t dt, int bins) {
  const std::uint64_t offset = t - t_start;
  const std::uint64_t b = offset * static_cast<std::uint64_t>(bins) / dt;
  return static_cast<int>(std::min<std::uint64_t>(b, static_cast<std::uint64_t>(bins - 1)));
}

std::pair<std::size_t, std::size_t> window_range(std::span<const Event> events,
                                                 std::uint64_t t_start, std::uint64_t dt) {
  auto by_time = [](const Event& e, std::uint64_t t) { return e.t < t; };
  const auto first = std::lower_bound(events.begin(), events.end(), t_start, by_time);
  const auto last = std::lower_bound(first, events.end(), t_start + dt, by_time);
  return {static_cast<std::size_t>(first - events.begin()),
          static_cast<std::size_t>(last - events.begin())};
}

BinnedVolume bin_events(std::span<const Event> events, std::uint64_t t_start, std::uint64_t dt,
                        int bins, int height, int width) {
  if (dt == 0) throw std::invalid_argument("bin_events: dt must be positive");
  if (bins < 1) throw std::invalid_argument("bin_events: need at least one bin");
  BinnedVolume volume(bins, height, width, t_start, dt);
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    if (e.t < t_start || e.t - t_start >= dt) continue;
    if (e.x >= width || e.y >= height) {
      throw BinningError("bin_events: event " + std::to_string(i) + " at (" +
                             std::to_string(e.x) + ", " + std::to_string(e.y) +
                             ") lies outside the " + std::to_string(width) + "x" +
                             std::to_string(height) + " grid",
                         i);
    }
    const int b = bin_index(e.t, t_start, dt, bins);
    volume.at(b, static_cast<int>(e.p), e.y, e.x) += 1;
  }
  return volume;
}

}  // namespace toffe
