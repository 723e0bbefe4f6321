#pragma once

#include <cstdint>
#include <vector>

namespace toffe {

enum class Polarity : std::uint8_t { Off = 0, On = 1 };

/// One address-event: pixel column/row, timestamp in microseconds, polarity.
struct Event {
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  std::uint64_t t = 0;
  Polarity p = Polarity::Off;

  friend bool operator==(const Event&, const Event&) = default;
};

using EventStream = std::vector<Event>;

/// Sensor geometry in pixels.
struct SensorSize {
  int width = 0;
  int height = 0;

  friend bool operator==(const SensorSize&, const SensorSize&) = default;
};

bool is_time_sorted(const EventStream& events);

}  // namespace toffe
