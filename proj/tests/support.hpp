#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "lend/errors.hpp"

namespace testutil {

// Runs fn, expecting it to throw lend::Error; returns the code it carried.
template <typename Fn>
lend::ErrCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const lend::Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected a lend::Error, none was thrown");
}

// Fresh per-test scratch directory under the system temp root.
inline std::string scratch_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() / ("lend_test_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace testutil
