#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "toffe/neuro/tape.hpp"

namespace toffe::neuro {

// Little-endian layout:
//   "TFCK" | version u32 | kind (u16 length + bytes)
//   | metadata count u32 | (key, value) as length-prefixed strings
//   | blob count u32 | per blob: name | rank u8 | dims u32 * rank | f32 * numel

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct NamedBlob {
  std::string name;
  Shape shape;
  std::vector<float> values;
};

struct Checkpoint {
  std::string kind;
  std::map<std::string, std::string> metadata;
  std::vector<NamedBlob> blobs;

  void add(const Parameter& p);
  const NamedBlob& blob(const std::string& name) const;
  /// Copies a blob into a parameter after checking the shape.
  void load_into(Parameter& p) const;
  const std::string& meta(const std::string& key) const;
};

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace toffe::neuro
