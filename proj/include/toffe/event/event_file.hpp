#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "toffe/event/event.hpp"

namespace toffe {

// On-disk layout, all little-endian:
//   header (20 bytes): "TOFE" | version u32 | width u16 | height u16 | count u64
//   record (13 bytes): x u16 | y u16 | t u64 | p u8

inline constexpr char kEventFileMagic[4] = {'T', 'O', 'F', 'E'};
inline constexpr std::uint32_t kEventFileVersion = 1;
inline constexpr std::size_t kEventHeaderBytes = 20;
inline constexpr std::size_t kEventRecordBytes = 13;

class EventFileError : public std::runtime_error {
 public:
  enum class Kind { Io, BadMagic, BadVersion, Truncated, Unsorted, BadRecord };

  EventFileError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct EventFile {
  SensorSize sensor;
  EventStream events;
};

void write_events(const std::filesystem::path& path, const EventStream& events, SensorSize sensor);
EventFile read_events(const std::filesystem::path& path);

}  // namespace toffe
