#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace go4align {

struct CellCheck {
  std::string table;
  std::string method;
  std::string column;  // "delta_m" or "MR"
  double recomputed = 0.0;
  double published = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline constexpr double kDeltaMTolerance = 0.15;
inline constexpr double kTightTolerance = 0.01;

// Recomputes every published Δm% and MR cell of the NYUv2 (nyuv2.csv) and
// CityScapes (cityscapes.csv) fixtures in `fixture_dir`.
std::vector<CellCheck> verify_tables(const std::filesystem::path& fixture_dir);

}  // namespace go4align
