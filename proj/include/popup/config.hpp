#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "popup/assembly.hpp"
#include "popup/deployment.hpp"
#include "popup/pattern.hpp"
#include "popup/slice_optimizer.hpp"
#include "popup/target_surfaces.hpp"

namespace popup {

/// Sections of `key = value` pairs. `#` and `;` start comments.
using IniDocument = std::map<std::string, std::map<std::string, std::string>>;

IniDocument parse_ini(const std::string& text);

struct TargetConfig {
  std::string kind = "cylinder";  // plane, cylinder, sphere, saddle, composite, sampled
  double radius = 0.0;            // 0 means N * w
  double length = 0.0;            // plane and sampled chain length; 0 means N * w
  double center = 0.0;
  double margin = 0.0;
  double waist = 1.0;
  double slope = 1.0;
  double half_extent = 1.0;
  std::array<double, 3> composite_radii{3.0, 1.5, 2.0};  // R1, R2, R3
  double composite_length = 5.0;
  std::string grid_path;
};

struct SliceConfig {
  int n = 1;
  int count = 1;
  double width = 1.0;
  std::vector<double> widths;                 // overrides count x width when given
  std::array<int, 3> region_counts{11, 26, 15};
  std::optional<std::array<double, 3>> region_widths;  // formula widths when absent
};

struct OutputConfig {
  std::filesystem::path dir = "out";
  std::string format;  // empty: command default
  double scale_cm = 1.0;
  bool microcuts = false;
  double support_factor = 0.5;
};

struct CurvatureConfig {
  GridAxis r{0.5, 3.5, 61};
  GridAxis lambda{0.5, 1.5, 41};
  GridAxis phi{kPi / 4, kPi / 4, 1};
  double psi = kPi / 2;
  std::optional<double> target_K;
  std::optional<double> target_H;
};

struct SplayConfig {
  std::optional<std::array<double, 5>> alpha;
  double spacing = 1.0;
  double width = 1.0;
  int samples = 91;
};

struct PipelineConfig {
  TargetConfig target;
  SliceConfig slices;
  SolverConfig solver;
  DeploymentSchedule deployment;
  OutputConfig output;
  CurvatureConfig curvature;
  SplayConfig splay;

  /// Throws InvalidConfig naming the offending key.
  void validate() const;

  SplayStructure splay_structure() const;
  std::optional<CurvatureTarget> curvature_target() const;
};

/// Builds a config from INI text. Unknown sections or keys are errors.
PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);

/// Parses `min:max:n`.
GridAxis parse_axis(const std::string& text);

/// Parses `r_min:r_max:n,lambda_min:lambda_max:n`.
std::pair<GridAxis, GridAxis> parse_grid(const std::string& text);

}  // namespace popup
