#pragma once

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "popup/discrete_curvature.hpp"
#include "popup/tri_mesh.hpp"
#include "popup/unit_kinematics.hpp"

namespace popup {

struct AssemblyParams {
  double r = 1.0;
  double phi = kPi / 4;
  double lambda = 1.0;

  /// Throws InvalidConfig unless r > 0, 0 < phi < pi/2, lambda > 0.
  void validate() const;
};

/// Five-cell patch: central fold vertex at polar (r, phi) in its deployment
/// plane; in-slice neighbours are vertices 1 and 2 of a uniform three-cell
/// chain of base cells (L = 3 b); cross-slice neighbours are fold vertices of
/// cells with lx = lz = (1/2 + lambda) b at y = -/+ ly. The ring is ordered so
/// the star normal points away from the chain origin.
std::pair<TriMesh, VertexStar> five_cell_assembly(const AssemblyParams& params, const UnitCell& base,
                                                  DeploymentAngle psi);

/// Base cell of the calibrated construction: b = 1, ly = b / sqrt(2).
UnitCell default_base_cell();

namespace star {

/// Scalar-generic five-cell star (center, ring) for derivatives in (r, lambda).
template <class T>
std::pair<V3<T>, std::array<V3<T>, 4>> five_cell(const T& r, const T& lambda, double phi, double psi, double b,
                                                 double ly) {
  using std::cos;
  using std::sin;
  const double c = std::cos(psi);
  const double s = std::sin(psi);
  const T lx = r * std::cos(phi);
  const T lz = r * std::sin(phi);
  V3<T> center(lx + lz * c, T(0), lz * s);
  const double L = 3.0 * b;
  auto chain = [&](double i) { return V3<T>(T(i * b + (L - i * b) * c), T(0), T((L - i * b) * s)); };
  const T cl = (T(0.5) + lambda) * b;
  auto cross = [&](double y) { return V3<T>(cl + cl * c, T(y), cl * s); };
  return {center, {chain(1.0), cross(-ly), chain(2.0), cross(ly)}};
}

}  // namespace star

struct GridAxis {
  double min = 0.0;
  double max = 1.0;
  int n = 1;

  double at(int i) const { return n == 1 ? min : min + (max - min) * i / (n - 1); }
};

struct GridSample {
  double r = 0.0;
  double lambda = 0.0;
  double phi = 0.0;
  double K = 0.0;
  double H = 0.0;
  bool valid = false;
  std::string error;
};

struct ContourSegment {
  std::string field;  // "K" or "H"
  double phi = 0.0;
  Vec2 a = Vec2::Zero();  // (r, lambda)
  Vec2 b = Vec2::Zero();
};

struct CurvatureMap {
  GridAxis r_axis;
  GridAxis lambda_axis;
  GridAxis phi_axis;
  double psi = kPi / 2;
  std::vector<GridSample> samples;  // index ((k * n_lambda) + j) * n_r + i
  std::vector<ContourSegment> contours;

  const GridSample& at(int i, int j, int k = 0) const {
    return samples[(static_cast<std::size_t>(k) * lambda_axis.n + j) * r_axis.n + i];
  }
};

/// Dense K and H over the (r, lambda[, phi]) grid with zero-level contour
/// segments from sign changes along grid edges, refined by bisection to
/// `bisect_tol`. Samples that fail to evaluate are masked (valid = false).
CurvatureMap curvature_map(const GridAxis& r_axis, const GridAxis& lambda_axis, const GridAxis& phi_axis,
                           double psi, double bisect_tol = 1e-10);

/// K and H of the five-cell assembly at one parameter point (mixed area).
CurvatureSample assembly_curvature(const AssemblyParams& params, double psi = kPi / 2);

/// Plus-shaped patch of five splayed cells on a square grid: central cell,
/// two in-slice neighbours (-x, +x) and two cross-slice neighbours (-y, +y).
struct SplayStructure {
  std::array<double, 5> alpha{};  // center, in-slice -, in-slice +, cross -, cross +
  double spacing = 1.0;
  double width = 1.0;
  UnitCell base{1.0, 1.0, 1.0, 0.0};

  /// Shipped field with one K sign change between 0.16 pi and 0.47 pi.
  static SplayStructure designed();
  static SplayStructure uniform(double alpha);

  VertexStar star(double psi) const;
};

struct TracePoint {
  double psi = 0.0;
  double K = 0.0;
};

struct CurvatureTrace {
  std::vector<TracePoint> samples;
  std::vector<double> sign_changes;  // refined crossing angles
};

/// K at the central vertex over the schedule; sign changes are counted
/// between samples with |K| above `zero_tol` and refined by bisection.
CurvatureTrace curvature_trace(const SplayStructure& structure, const std::vector<double>& psi_schedule,
                               double zero_tol = 1e-9);

struct CurvatureTarget {
  std::optional<double> K;
  std::optional<double> H;
  double weight_K = 1e4;
  double weight_H = 1e4;
  double phi = kPi / 4;
  double psi = kPi / 2;
  double tol_K = 1e-4;
};

struct CurvatureDesign {
  double r = 0.0;
  double lambda = 0.0;
  double K = 0.0;
  double H = 0.0;
  double loss = 0.0;
  double regularizer = 0.0;
  int iterations = 0;
};

/// Search box of the curvature-targeted design.
struct CurvatureBox {
  double r_min = 0.2;
  double r_max = 4.2;
  double lambda_min = 0.1;
  double lambda_max = 2.0;
};

/// Smoothness/uniformity loss of the three-cell chain through the center,
/// [cross cell, center cell, cross cell], with delta = 1.
template <class T>
T assembly_regularizer(const T& r, const T& lambda, double phi) {
  const T lc = T(0.5) + lambda;
  const T cx = r * std::cos(phi);
  const T cz = r * std::sin(phi);
  auto sq = [](const T& v) { return v * v; };
  return T(2) * sq(cx - lc) + T(2) * sq(cz - lc) + T(4) * sq(lc - T(1)) + sq(cx - T(1)) + sq(cz - T(1));
}

/// Value and gradient in (r, lambda) of the curvature-augmented loss.
double curvature_loss(const CurvatureTarget& target, double weight_K, double weight_H, const Vec2& x,
                      Vec2* grad);

/// Minimizes the regularizer plus curvature penalties over (r, lambda).
/// Throws Unattainable when a target lies outside the curvature range swept
/// over the search box (the message reports the nearest achievable value).
CurvatureDesign optimize_assembly_curvature(const CurvatureTarget& target, const CurvatureBox& box = {});

}  // namespace popup
