#include "toffe/event/event_file.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

namespace toffe {
namespace {

template <typename T>
void put_le(std::vector<unsigned char>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<unsigned char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(const unsigned char* in) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<std::uint64_t>(in[i]) << (8 * i);
  }
  return static_cast<T>(v);
}

}  // namespace

void write_events(const std::filesystem::path& path, const EventStream& events, SensorSize sensor) {
  if (!is_time_sorted(events)) {
    throw EventFileError(EventFileError::Kind::Unsorted,
                         "write_events: stream is not sorted by timestamp");
  }
  std::vector<unsigned char> buf;
  buf.reserve(kEventHeaderBytes + events.size() * kEventRecordBytes);
  buf.insert(buf.end(), std::begin(kEventFileMagic), std::end(kEventFileMagic));
  put_le<std::uint32_t>(buf, kEventFileVersion);
  put_le<std::uint16_t>(buf, static_cast<std::uint16_t>(sensor.width));
  put_le<std::uint16_t>(buf, static_cast<std::uint16_t>(sensor.height));
  put_le<std::uint64_t>(buf, events.size());
  for (const Event& e : events) {
    put_le<std::uint16_t>(buf, e.x);
    put_le<std::uint16_t>(buf, e.y);
    put_le<std::uint64_t>(buf, e.t);
    put_le<std::uint8_t>(buf, static_cast<std::uint8_t>(e.p));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw EventFileError(EventFileError::Kind::Io, "write_events: cannot open " + path.string());
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) {
    throw EventFileError(EventFileError::Kind::Io, "write_events: write failed for " + path.string());
  }
}

EventFile read_events(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw EventFileError(EventFileError::Kind::Io, "read_events: cannot open " + path.string());
  }
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < kEventHeaderBytes) {
    if (buf.size() >= 4 && std::memcmp(buf.data(), kEventFileMagic, 4) != 0) {
      throw EventFileError(EventFileError::Kind::BadMagic, "read_events: bad magic in " + path.string());
    }
    throw EventFileError(EventFileError::Kind::Truncated, "read_events: truncated header in " + path.string());
  }
  if (std::memcmp(buf.data(), kEventFileMagic, 4) != 0) {
    throw EventFileError(EventFileError::Kind::BadMagic, "read_events: bad magic in " + path.string());
  }
  const auto version = get_le<std::uint32_t>(buf.data() + 4);
  if (version != kEventFileVersion) {
    throw EventFileError(EventFileError::Kind::BadVersion,
                         "read_events: unsupported version " + std::to_string(version));
  }
  EventFile file;
  file.sensor.width = get_le<std::uint16_t>(buf.data() + 8);
  file.sensor.height = get_le<std::uint16_t>(buf.data() + 10);
  const auto count = get_le<std::uint64_t>(buf.data() + 12);
  const std::size_t payload = buf.size() - kEventHeaderBytes;
  if (count > payload / kEventRecordBytes) {
    throw EventFileError(EventFileError::Kind::Truncated,
                         "read_events: header declares " + std::to_string(count) +
                             " records but file holds " + std::to_string(payload / kEventRecordBytes));
  }
  if (payload != count * kEventRecordBytes) {
    throw EventFileError(EventFileError::Kind::BadRecord, "read_events: trailing bytes after records");
  }
  file.events.resize(count);
  const unsigned char* p = buf.data() + kEventHeaderBytes;
  for (std::size_t i = 0; i < count; ++i, p += kEventRecordBytes) {
    Event& e = file.events[i];
    e.x = get_le<std::uint16_t>(p);
    e.y = get_le<std::uint16_t>(p + 2);
    e.t = get_le<std::uint64_t>(p + 4);
    const auto pol = get_le<std::uint8_t>(p + 12);
    if (pol > 1) {
      throw EventFileError(EventFileError::Kind::BadRecord,
                           "read_events: record " + std::to_string(i) + " has polarity " + std::to_string(pol));
    }
    e.p = static_cast<Polarity>(pol);
    if (i > 0 && e.t < file.events[i - 1].t) {
      throw EventFileError(EventFileError::Kind::Unsorted,
                           "read_events: record " + std::to_string(i) + " goes back in time");
    }
  }
  return file;
}

}  // namespace toffe
