#pragma once

#include <span>
#include <vector>

#include "popup/branching.hpp"
#include "popup/tri_mesh.hpp"

namespace popup {

/// Frame angles psi_k = (k - 1) / (N - 1) * pi / 2, k = 1..N.
struct DeploymentSchedule {
  int frames = 2;

  /// Throws InvalidConfig for fewer than two frames.
  void validate() const;
  std::vector<double> angles() const;
};

/// Each segment becomes a rectangle of its width (4 vertices, 2 faces) at
/// deployment angle psi. Panels widen along y; separations and support strips
/// widen within the floor plane, so every rectangle is rigid under deployment.
/// Throws DegeneratePanel for zero-length or zero-width segments.
TriMesh thicken_to_mesh(const BranchNetwork& network, double psi = kPi / 2);
TriMesh thicken_to_mesh(const BranchNetwork& network, std::span<const double> widths, double psi);

/// Sum of segment length x width.
double panel_area(const BranchNetwork& network);

/// One mesh per schedule angle, identical connectivity. Topology is validated
/// at every frame angle first (TopologyBroken names the frame).
std::vector<TriMesh> deployment_frames(const BranchNetwork& network, const DeploymentSchedule& schedule);

}  // namespace popup
