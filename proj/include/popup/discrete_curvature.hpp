#pragma once

#include <Eigen/Geometry>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "popup/errors.hpp"
#include "popup/tri_mesh.hpp"

namespace popup {

enum class VertexArea {
  Mixed,        // Voronoi area with the obtuse-triangle fallback
  Barycentric,  // one third of the incident triangle areas
};

struct CurvatureSample {
  double K = 0.0;  // angle defect, radians
  double H = 0.0;  // signed mean curvature, 1/length
  double area = 0.0;
  std::vector<double> interior_angles;
  std::vector<std::pair<double, double>> cot_weights;
  Vec3 normal = Vec3::Zero();
  bool obtuse_fallback = false;
};

/// Gauss-Bonnet angle defect 2 pi - sum(alpha_j) of a closed star.
/// Throws DegenerateStar for open stars, rings of fewer than three vertices,
/// or edges shorter than `tol`.
double angle_defect(const VertexStar& star, double tol = 1e-12);

/// Full curvature sample of a closed star: angle defect, cotangent mean
/// curvature projected on the area-weighted normal, weights and angles.
CurvatureSample star_curvature(const VertexStar& star, VertexArea area = VertexArea::Mixed,
                               double tol = 1e-12);

/// Cotangent mean curvature at an interior mesh vertex.
double cotan_mean_curvature(const TriMesh& mesh, int vertex, VertexArea area = VertexArea::Mixed);

/// Angle defect at an interior mesh vertex.
double angle_defect(const TriMesh& mesh, int vertex);

/// Sum of angle defects over all vertices of a closed mesh (4 pi for a sphere).
double total_angle_defect(const TriMesh& mesh);

struct FundamentalForms {
  Mat2 a = Mat2::Identity();
  Mat2 b = Mat2::Zero();

  double gaussian() const { return b.determinant() / a.determinant(); }
  double mean() const { return 0.5 * (a.inverse() * b).trace(); }
};

/// Local quadric fit over the one-ring in the tangent frame of the vertex
/// normal. Heights are measured toward -normal so a surface that is convex
/// toward +normal has positive b, matching the sign of the cotangent H.
/// Rings of five or more vertices fit the tangent slope too; smaller rings fit
/// the three curvature coefficients only (minimum-norm when underdetermined).
FundamentalForms estimate_fundamental_forms(const VertexStar& star);
FundamentalForms estimate_fundamental_forms(const TriMesh& mesh, int vertex);

// Scalar-generic star formulas. Instantiated with double and with Eigen's
// AutoDiffScalar so the curvature loss gets exact derivatives.
namespace star {

template <class T>
using V3 = Eigen::Matrix<T, 3, 1>;

template <class T>
T angle_at(const V3<T>& apex, const V3<T>& a, const V3<T>& b) {
  using std::acos;
  using std::sqrt;
  // law of cosines on the three edge lengths
  const T la2 = (a - apex).squaredNorm();
  const T lb2 = (b - apex).squaredNorm();
  const T lab2 = (a - b).squaredNorm();
  T c = (la2 + lb2 - lab2) / (T(2) * sqrt(la2) * sqrt(lb2));
  if (c > T(1)) c = T(1);
  if (c < T(-1)) c = T(-1);
  return acos(c);
}

template <class T>
T cot_at(const V3<T>& apex, const V3<T>& a, const V3<T>& b) {
  const V3<T> u = a - apex;
  const V3<T> v = b - apex;
  return u.dot(v) / u.cross(v).norm();
}

template <class T>
T angle_defect(const V3<T>& center, std::span<const V3<T>> ring) {
  T sum(0);
  const std::size_t k = ring.size();
  for (std::size_t i = 0; i < k; ++i) sum += angle_at<T>(center, ring[i], ring[(i + 1) % k]);
  return T(2 * 3.14159265358979323846) - sum;
}

template <class T>
struct MeanCurvature {
  T H;
  T area;
  V3<T> normal;
  bool obtuse_fallback = false;
};

template <class T>
MeanCurvature<T> mean_curvature(const V3<T>& center, std::span<const V3<T>> ring, VertexArea kind) {
  const std::size_t k = ring.size();
  MeanCurvature<T> out{T(0), T(0), V3<T>::Zero(), false};
  V3<T> nsum = V3<T>::Zero();
  for (std::size_t i = 0; i < k; ++i) {
    const V3<T>& a = ring[i];
    const V3<T>& b = ring[(i + 1) % k];
    const V3<T> cr = (a - center).cross(b - center);
    nsum += cr;
    const T tri_area = T(0.5) * cr.norm();
    if (kind == VertexArea::Barycentric) {
      out.area += tri_area / T(3);
      continue;
    }
    const T dot0 = (a - center).dot(b - center);
    const T dota = (center - a).dot(b - a);
    const T dotb = (center - b).dot(a - b);
    if (dot0 < T(0)) {
      out.area += tri_area / T(2);
      out.obtuse_fallback = true;
    } else if (dota < T(0) || dotb < T(0)) {
      out.area += tri_area / T(4);
      out.obtuse_fallback = true;
    } else {
      out.area += ((a - center).squaredNorm() * cot_at<T>(b, center, a) +
                   (b - center).squaredNorm() * cot_at<T>(a, center, b)) /
                  T(8);
    }
  }
  out.normal = nsum / nsum.norm();

  V3<T> hvec = V3<T>::Zero();
  for (std::size_t i = 0; i < k; ++i) {
    const V3<T>& vi = ring[i];
    const V3<T>& vp = ring[(i + k - 1) % k];
    const V3<T>& vn = ring[(i + 1) % k];
    const T w = cot_at<T>(vp, center, vi) + cot_at<T>(vn, center, vi);
    hvec += w * (center - vi);
  }
  hvec /= T(2) * out.area;
  out.H = hvec.dot(out.normal) / T(2);
  return out;
}

}  // namespace star

}  // namespace popup
