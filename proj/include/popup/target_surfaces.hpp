#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "popup/types.hpp"

namespace popup {

enum class SurfaceKind { Plane, Cylinder, SphericalCap, Saddle, Composite, Sampled };

std::string to_string(SurfaceKind kind);

/// Regular (x, y) grid of heights, row-major in y: z[iy * nx + ix].
struct SampledGrid {
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> z;

  double at(std::size_t ix, std::size_t iy) const { return z[iy * xs.size() + ix]; }
  /// Bilinear interpolation; throws DomainExceeded outside the grid.
  double eval(double x, double y) const;
};

/// Reads a CSV grid with header `x,y,z` covering a full rectangular lattice.
SampledGrid read_sampled_grid(const std::string& path);

struct RegionPatch;

/// Target surface. Axisymmetric kinds are revolved radius profiles r(z) whose
/// slices are quarter circles; height-field kinds give a slice curve z = f(x)
/// on [0, L] per slice plane.
class TargetSurface {
 public:
  using Profile = std::function<double(double)>;
  using Field = std::function<double(double, double)>;

  static TargetSurface plane(double length, double y_min = -1e9, double y_max = 1e9);
  static TargetSurface cylinder(double radius, double y_min = -1e9, double y_max = 1e9);
  /// Sphere of radius R centred at y = center; the domain stops short of the
  /// poles by `margin`.
  static TargetSurface spherical_cap(double radius, double center, double margin);
  /// Hyperboloid of one sheet r(z) = sqrt(waist^2 + (slope (z - center))^2), K < 0.
  static TargetSurface saddle(double waist, double slope, double center, double half_extent);
  /// Sampled height field; each slice curve must run from (0, L) to (L, 0).
  static TargetSurface sampled(SampledGrid grid, double length);

  SurfaceKind kind() const { return kind_; }
  bool axisymmetric() const { return static_cast<bool>(profile_); }
  double domain_min() const { return lo_; }
  double domain_max() const { return hi_; }

  /// Profile radius at z (axisymmetric kinds only).
  double radius(double z) const;
  /// Height at (x, y) (height-field kinds only).
  double height(double x, double y) const;
  /// Slice length for height-field kinds.
  double length() const { return length_; }

  /// Affine map from sheet position s to surface coordinate: z = z0 + scale s.
  TargetSurface& set_position_map(double z0, double scale);
  double surface_coordinate(double s) const { return z0_ + scale_ * s; }

 private:
  friend TargetSurface composite_profile(double r1, double r2, double r3, double length);
  friend std::vector<RegionPatch> composite_patches(double, double, double, double, int,
                                             const std::array<int, 3>&,
                                             const std::array<double, 3>&);

  SurfaceKind kind_ = SurfaceKind::Plane;
  Profile profile_;
  Field field_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  double length_ = 1.0;
  double z0_ = 0.0;
  double scale_ = 1.0;
};

/// Three-piece cosine/sine radius profile on [-2L, 2L]: R1 at -2L, R2 at -L,
/// R3 at L. Throws OrderingViolation unless R1 > R3 > R2 > 0.
TargetSurface composite_profile(double r1, double r2, double r3, double length);

/// Piece of the composite profile (0, 1, 2) evaluated at z without domain
/// clamping; used for the continuity and stitch checks.
double composite_piece(int piece, double z, double r1, double r2, double r3, double length);

struct SliceSpec {
  int n = 1;                   // units per slice
  std::vector<double> widths;  // one per slice, sheet units
  double length = 1.0;         // normalized chain length

  static SliceSpec uniform(int n, int slices, double width);

  int num_slices() const { return static_cast<int>(widths.size()); }
  double delta() const { return length / n; }
  /// s_j = sum_{k<j} w_k; size num_slices() + 1, last entry the total width.
  std::vector<double> positions() const;
  double total_width() const;
  /// Throws InvalidConfig on n < 1, empty or non-positive widths.
  void validate() const;
};

enum class CurveKind { Arc, Graph };

/// Target curve of one slice in its (x, z) plane: a quarter circle of radius
/// R about the origin, or a graph z = f(x) on [0, L]. Both run from (0, L)
/// to (L, 0) with L = radius for arcs.
struct SliceCurve {
  int index = 0;
  double y = 0.0;      // sheet position s_j
  double width = 1.0;  // slice width w_j
  CurveKind kind = CurveKind::Arc;
  double length = 1.0;
  std::function<double(double)> f;
  std::function<double(double)> df;

  static SliceCurve arc(double radius);
  static SliceCurve line(double length);
  /// Height at x: the arc z = sqrt(R^2 - x^2) or f(x).
  double eval(double x) const;
};

/// One SliceCurve per slice position. Axisymmetric surfaces give quarter
/// circles of radius r(z(s_j)); height fields give z = height(x, s_j).
/// Throws DomainExceeded for positions outside the surface domain and
/// OrderingViolation for sampled slices that are not monotone.
std::vector<SliceCurve> slice(const TargetSurface& surface, const SliceSpec& spec);

/// Slice widths of the composite profile regions: L/N, L/(3N), L/(2N).
std::vector<double> region_widths(const TargetSurface& profile, int n, double length);

struct RegionPatch {
  int region = 0;
  TargetSurface surface;
  SliceSpec spec;
  double z_begin = 0.0;
  double z_end = 0.0;
};

/// Splits the composite profile into three independently sliced patches with
/// the given per-region slice counts and widths. Each patch maps its sheet
/// span onto its z interval.
std::vector<RegionPatch> composite_patches(double r1, double r2, double r3, double length, int n,
                                           const std::array<int, 3>& counts,
                                           const std::array<double, 3>& widths);

/// Radii of the two pieces meeting at the boundary between region k and k+1.
/// Throws StitchMismatch when they differ by more than `tol`.
void check_stitch(double r1, double r2, double r3, double length, int boundary, double tol = 1e-6);

}  // namespace popup
