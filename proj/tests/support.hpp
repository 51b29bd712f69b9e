#pragma once

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "nlsdelta/errors.hpp"
#include "nlsdelta/grid.hpp"

namespace testing_support {

/// Kind of the nlsdelta::Error thrown by fn; records a failure when none is thrown.
template <class Fn>
nlsdelta::ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const nlsdelta::Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an nlsdelta::Error";
  return nlsdelta::ErrorKind::io;
}

inline double max_abs_diff(const nlsdelta::Field& a, const nlsdelta::Field& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

inline double max_abs(const nlsdelta::Field& a) {
  double m = 0.0;
  for (const auto& v : a) m = std::max(m, std::abs(v));
  return m;
}

/// Fresh scratch directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("nlsdelta_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing_support
