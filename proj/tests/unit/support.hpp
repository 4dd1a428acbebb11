#pragma once

#include <filesystem>
#include <string>

#include "waveslam/environment.hpp"

namespace test_support {

inline std::filesystem::path source_dir() { return WAVESLAM_SOURCE_DIR; }
inline std::filesystem::path scenario_path(const std::string& name) {
  return source_dir() / "scenarios" / (name + ".json");
}

// Fresh, empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("waveslam_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline waveslam::Material brick() { return waveslam::default_materials()[0]; }
inline waveslam::Material glass() { return waveslam::default_materials()[1]; }

// Axis-aligned brick box [x0, x1] x [y0, y1].
inline std::vector<waveslam::WallSegment> box(double x0, double y0, double x1, double y1,
                                              const waveslam::Material& m = brick()) {
  using waveslam::Vec2;
  return {{Vec2(x0, y0), Vec2(x1, y0), m}, {Vec2(x1, y0), Vec2(x1, y1), m},
          {Vec2(x1, y1), Vec2(x0, y1), m}, {Vec2(x0, y1), Vec2(x0, y0), m}};
}

}  // namespace test_support
