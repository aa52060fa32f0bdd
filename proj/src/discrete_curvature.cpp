#include "popup/discrete_curvature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

namespace popup {

namespace {

void check_star(const VertexStar& star, double tol) {
  if (!star.closed) throw Error(ErrorKind::DegenerateStar, "star is open");
  const std::size_t k = star.ring.size();
  if (k < 3) {
    std::ostringstream msg;
    msg << "closed star needs at least 3 ring vertices, got " << k;
    throw Error(ErrorKind::DegenerateStar, msg.str());
  }
  for (std::size_t i = 0; i < k; ++i) {
    const Vec3& a = star.ring[i];
    const Vec3& b = star.ring[(i + 1) % k];
    const double e0 = (a - star.center).norm();
    const double e1 = (b - a).norm();
    if (e0 < tol || e1 < tol) {
      std::ostringstream msg;
      msg << "triangle " << i << " has an edge shorter than " << tol;
      throw Error(ErrorKind::DegenerateStar, msg.str());
    }
    if ((a - star.center).cross(b - star.center).norm() < tol * tol) {
      std::ostringstream msg;
      msg << "triangle " << i << " is collinear at the center";
      throw Error(ErrorKind::DegenerateStar, msg.str());
    }
  }
}

}  // namespace

double angle_defect(const VertexStar& star, double tol) {
  check_star(star, tol);
  return star::angle_defect<double>(star.center, star.ring);
}

CurvatureSample star_curvature(const VertexStar& star, VertexArea area, double tol) {
  check_star(star, tol);
  CurvatureSample out;
  const std::size_t k = star.ring.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double a = star::angle_at<double>(star.center, star.ring[i], star.ring[(i + 1) % k]);
    out.interior_angles.push_back(a);
    sum += a;
  }
  out.K = 2.0 * kPi - sum;
  for (std::size_t i = 0; i < k; ++i) {
    const Vec3& vi = star.ring[i];
    const Vec3& vp = star.ring[(i + k - 1) % k];
    const Vec3& vn = star.ring[(i + 1) % k];
    out.cot_weights.emplace_back(star::cot_at<double>(vp, star.center, vi),
                                 star::cot_at<double>(vn, star.center, vi));
  }
  const auto mc = star::mean_curvature<double>(star.center, star.ring, area);
  out.H = mc.H;
  out.area = mc.area;
  out.normal = mc.normal;
  out.obtuse_fallback = mc.obtuse_fallback;
  return out;
}

namespace {

VertexStar interior_star(const TriMesh& mesh, int vertex) {
  VertexStar star = vertex_star(mesh, vertex);
  if (!star.closed) {
    std::ostringstream msg;
    msg << "vertex " << vertex << " is on the boundary";
    throw Error(ErrorKind::DegenerateStar, msg.str());
  }
  return star;
}

}  // namespace

double cotan_mean_curvature(const TriMesh& mesh, int vertex, VertexArea area) {
  return star_curvature(interior_star(mesh, vertex), area).H;
}

double angle_defect(const TriMesh& mesh, int vertex) { return angle_defect(interior_star(mesh, vertex)); }

double total_angle_defect(const TriMesh& mesh) {
  double total = 0.0;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) total += angle_defect(mesh, static_cast<int>(v));
  return total;
}

FundamentalForms estimate_fundamental_forms(const VertexStar& star) {
  const std::size_t k = star.ring.size();
  if (k < 3) {
    std::ostringstream msg;
    msg << "one-ring of " << k << " vertices cannot support a quadric fit";
    throw Error(ErrorKind::RankDeficientFit, msg.str());
  }
  Vec3 nsum = Vec3::Zero();
  const std::size_t nf = star.closed ? k : k - 1;
  for (std::size_t i = 0; i < nf; ++i) {
    nsum += (star.ring[i] - star.center).cross(star.ring[(i + 1) % k] - star.center);
  }
  if (nsum.norm() < 1e-14) throw Error(ErrorKind::RankDeficientFit, "one-ring has no defined normal");
  const Vec3 n = nsum.normalized();
  const Vec3 e1 = (std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY()).cross(n).normalized();
  const Vec3 e2 = n.cross(e1);

  std::vector<Vec2> uv;
  std::vector<double> h;
  for (const auto& p : star.ring) {
    const Vec3 d = p - star.center;
    uv.emplace_back(d.dot(e1), d.dot(e2));
    h.push_back(-d.dot(n));
  }

  // Collinear projections leave the quadric undetermined in one direction.
  Eigen::MatrixXd spread(static_cast<Eigen::Index>(k), 2);
  for (std::size_t i = 0; i < k; ++i) spread.row(static_cast<Eigen::Index>(i)) = uv[i].transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(spread);
  if (svd.singularValues()(1) < 1e-10 * std::max(1.0, svd.singularValues()(0))) {
    throw Error(ErrorKind::RankDeficientFit, "one-ring projects onto a line");
  }

  const bool with_slope = k >= 5;
  const int cols = with_slope ? 5 : 3;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(k), cols);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const double u = uv[i].x();
    const double v = uv[i].y();
    m(r, 0) = 0.5 * u * u;
    m(r, 1) = u * v;
    m(r, 2) = 0.5 * v * v;
    if (with_slope) {
      m(r, 3) = u;
      m(r, 4) = v;
    }
    rhs(r) = h[i];
  }
  const Eigen::VectorXd c = m.completeOrthogonalDecomposition().solve(rhs);

  FundamentalForms out;
  Vec2 g = Vec2::Zero();
  if (with_slope) g = Vec2(c(3), c(4));
  Mat2 hess;
  hess << c(0), c(1), c(1), c(2);
  out.a = Mat2::Identity() + g * g.transpose();
  out.b = hess / std::sqrt(1.0 + g.squaredNorm());
  return out;
}

FundamentalForms estimate_fundamental_forms(const TriMesh& mesh, int vertex) {
  return estimate_fundamental_forms(vertex_star(mesh, vertex));
}

}  // namespace popup
