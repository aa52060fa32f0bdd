#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "popup/branching.hpp"
#include "popup/config.hpp"
#include "popup/pattern.hpp"
#include "popup/slice_optimizer.hpp"

namespace popup {

struct CommandResult {
  std::vector<std::filesystem::path> files;  // written, in order
  std::string summary;                       // human-readable, for standard output
};

struct DesignOutput {
  std::vector<SliceDesign> designs;
  BranchNetwork network;
  CutFoldPattern pattern;
  std::string svg;
  std::string csv;
  std::string report;
};

/// Slices the configured target and optimizes every slice. Composite targets
/// return the three regions' designs in order.
std::vector<std::vector<SliceDesign>> design_patches(const PipelineConfig& config);

/// Full slice, optimize, branch and export run without touching the disk.
DesignOutput run_design(const PipelineConfig& config);

/// K and H grids over (r, lambda) with zero contours: curvature_grid.csv and
/// curvature_contours.csv, plus curvature_design.csv when a target is set.
CommandResult cmd_curvature_map(const PipelineConfig& config);

/// pattern.svg, network.csv and report.txt; `format` svg or csv restricts the
/// data files to one of the two.
CommandResult cmd_design(const PipelineConfig& config);

/// STL frames for the schedule from a network CSV, or from a fresh design
/// when `network_csv` is empty.
CommandResult cmd_deploy(const PipelineConfig& config, const std::optional<std::filesystem::path>& network_csv);

/// (psi, K) trace of the configured splay field: splay_trace.csv.
CommandResult cmd_splay_study(const PipelineConfig& config);

}  // namespace popup
