#pragma once

#include <filesystem>
#include <string>

#include "toffe/sim/random.hpp"

namespace toffe::test {

/// Fresh scratch directory under the build tree.
inline std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::path(TOFFE_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace toffe::test
