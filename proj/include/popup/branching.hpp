#pragma once

#include <span>
#include <string>
#include <vector>

#include "popup/slice_optimizer.hpp"
#include "popup/types.hpp"

namespace popup {

enum class SegmentTag { XPanel, ZPanel, Separation, SupportStrip };

std::string to_string(SegmentTag tag);
/// Parses "x-panel", "z-panel", "separation", "support-strip".
SegmentTag parse_tag(const std::string& s);

/// Centerline segment in deployed (psi = pi/2) coordinates.
struct SegmentRecord {
  Vec3 start = Vec3::Zero();
  Vec3 end = Vec3::Zero();
  double length = 0.0;
  SegmentTag tag = SegmentTag::XPanel;
  int slice = 0;
  int level = 0;
  double width = 0.0;  // panel width used for meshing and the pattern

  static SegmentRecord make(const Vec3& a, const Vec3& b, SegmentTag tag, int slice, int level, double width);
};

struct Branch {
  int first_slice = 0;   // the pair's shorter chain, lower index on ties
  int second_slice = -1;  // -1 for a lone trailing slice
  int levels = 0;         // separations emitted
  int terminated_at = -1; // level whose step had a negative increment, -1 if none
};

struct BranchNetwork {
  std::vector<SegmentRecord> segments;
  std::vector<double> slice_widths;
  std::vector<double> slice_offsets;  // s_j
  std::vector<double> slice_lengths;  // chain length L_j
  std::vector<Branch> branches;
  double support_factor = 0.5;

  /// Plane y of slice j: s_j + w_j / 2.
  double slice_plane(int j) const { return slice_offsets[j] + 0.5 * slice_widths[j]; }
  int num_slices() const { return static_cast<int>(slice_widths.size()); }

  /// Endpoint node ids (endpoints within `tol` share an id) and the
  /// segment -> (node, node) map.
  struct Graph {
    std::vector<Vec3> nodes;
    std::vector<std::pair<int, int>> edges;
  };
  Graph graph(double tol = 1e-9) const;
  bool connected(double tol = 1e-9) const;
};

struct NetworkOptions {
  double support_factor = 0.5;  // support and separation width / local slice width
  double tol = 1e-9;
};

/// Builds the strip network: every slice contributes its x- and z-panels;
/// branches pair slices (0,1), (2,3), ..., start on the shorter chain of the
/// pair and alternate between the two,
/// joining consecutive levels with horizontal separations that land on the
/// other staircase; a step with negative x increment ends the branch. One
/// support strip links each neighbouring pair of branches.
/// Throws EmptyNetwork when every branch ends at its first step.
BranchNetwork build_network(std::span<const SliceDesign> designs, const NetworkOptions& options = {});

/// Joins independently built patches side by side (slice offsets continue)
/// with one support strip across each patch boundary.
BranchNetwork stitch_networks(std::span<const BranchNetwork> patches, const NetworkOptions& options = {});

struct TopologyReport {
  std::vector<double> psi_checked;
  int segments = 0;
  int nodes = 0;
  bool connected = false;
  double max_length_error = 0.0;
  int crossings_checked = 0;
};

/// Connectivity, rigidity, panel ordering and in-plane crossing checks at the
/// given angles. Throws TopologyBroken naming the angle and segment(s).
TopologyReport validate_topology(const BranchNetwork& network,
                                 std::span<const double> psi_samples = std::span<const double>());

/// Segment endpoints mapped to deployment angle psi.
SegmentRecord deploy_segment(const SegmentRecord& s, double psi);

}  // namespace popup
