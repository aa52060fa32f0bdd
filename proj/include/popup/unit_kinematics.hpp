#pragma once

#include <array>
#include <span>
#include <vector>

#include "popup/types.hpp"

namespace popup {

/// Cut/fold dimensions of one popup unit, in sheet units.
///
/// `lx` is the cut length along the sheet, `lz` the cut height and `ly` the
/// fold width (the local slice width). `alpha` is the splay slope tan(gamma);
/// zero for a rectangular unit.
struct UnitCell {
  double lx = 1.0;
  double lz = 1.0;
  double ly = 1.0;
  double alpha = 0.0;

  bool valid() const;
  bool rectangular() const { return alpha == 0.0; }
};

/// Deployment angle Psi in [0, pi]. 0 is the folded-flat state, pi/2 fully
/// deployed.
class DeploymentAngle {
 public:
  DeploymentAngle() = default;
  explicit DeploymentAngle(double psi);

  double radians() const { return psi_; }

  static DeploymentAngle flat() { return DeploymentAngle(0.0); }
  static DeploymentAngle deployed() { return DeploymentAngle(kPi / 2); }

 private:
  double psi_ = kPi / 2;
};

struct FoldVertex {
  Vec3 position = Vec3::Zero();
  int unit_index = 0;
  int slice_index = 0;
};

/// Maps a point given in deployed (Psi = pi/2) coordinates to its position at
/// `psi`: floor components (x, y) stay put, the z component rides on the
/// rotating wall direction (cos psi, 0, sin psi). Every unit, chain and panel
/// in the pipeline moves with this map.
Vec3 deploy_point(const Vec3& deployed, DeploymentAngle psi);

/// Fold vertex of a single rectangular unit, (lx + lz cos psi, 0, lz sin psi).
FoldVertex unit_vertex(const UnitCell& cell, DeploymentAngle psi);

/// Fold vertices of a chain of units along one slice. Vertex i sits at
/// X_i + (L - Z_i) cos psi along x and (L - Z_i) sin psi along z with X_i, Z_i
/// the cumulative cut lengths and heights, so the deployed chain is a
/// descending staircase from (0, L) to (L, 0).
///
/// Throws IsometryViolation unless sum(lx) == sum(lz) == length within `tol`.
std::vector<FoldVertex> chain_vertices(std::span<const UnitCell> cells, DeploymentAngle psi,
                                       double length, int slice_index = 0, double tol = 1e-9);

/// Chain start point (0, L) carried by the kinematics: length * (cos psi, 0, sin psi).
Vec3 chain_origin(double length, DeploymentAngle psi);

/// Staircase corners between the x-panel and z-panel of each unit: corner i
/// is at X_i along the floor and L - Z_{i-1} along the wall. This is also the
/// unit's own fold vertex when the unit is placed at its base.
std::vector<Vec3> chain_corners(std::span<const UnitCell> cells, DeploymentAngle psi, double length);

/// Fold orientation of a splayed unit, 2 atan(alpha cos(psi/2)) evaluated with
/// atan2 so that t = 1 gives exactly pi/2.
double splay_theta(double alpha, double psi);

/// Vertex of a splayed unit in its local frame: (w (1-t^2)/(1+t^2),
/// w 2t/(1+t^2), 0) with t = alpha cos(psi/2) and w = cell.ly. The second
/// component is the out-of-plane height; |r| == w for every alpha and psi.
Vec3 splayed_vertex(const UnitCell& cell, double psi);

/// Offset between consecutive splayed cells along the strip direction.
/// `slope` is the splay slope s; s == 0 returns 0 (the limit of the formula).
double strip_offset(double b1, double b3, double slope, double psi);

struct ConnectorSolve {
  std::array<Vec3, 4> p{};
  Vec3 o1 = Vec3::Zero();
  Vec3 o2 = Vec3::Zero();
  double d = 0.0;
  /// Residuals of the alignment and inclination conditions for o1 and o2.
  std::array<double, 4> residuals{};
};

/// Fold-intersection points of the strip connecting two splayed cells.
///
/// O1 = (x, g1 - d, z) where (x, z) solve
///   (P1 - O1).(P2 - P1) = (P3 - O1).(P4 - P3)
///   (P1 - O1).u12       = |P2 - P1| cos(atan(slope))
/// and O2 = (x', g2 + d, z') solves the same system with P1<->P2, P3<->P4.
/// Throws SingularSystem (with the condition number) for a rank-deficient system.
ConnectorSolve solve_connector(const std::array<Vec3, 4>& p, double slope, double psi);

}  // namespace popup
