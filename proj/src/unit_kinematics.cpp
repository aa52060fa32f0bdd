#include "popup/unit_kinematics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "popup/errors.hpp"

namespace popup {

bool UnitCell::valid() const {
  return std::isfinite(lx) && std::isfinite(lz) && std::isfinite(ly) && std::isfinite(alpha) &&
         lx > 0.0 && lz > 0.0 && ly > 0.0;
}

DeploymentAngle::DeploymentAngle(double psi) : psi_(psi) {
  if (!(psi >= 0.0 && psi <= kPi)) {
    std::ostringstream msg;
    msg << "deployment angle " << psi << " outside [0, pi]";
    throw Error(ErrorKind::InvalidConfig, msg.str());
  }
}

Vec3 deploy_point(const Vec3& deployed, DeploymentAngle psi) {
  const double c = std::cos(psi.radians());
  const double s = std::sin(psi.radians());
  return {deployed.x() + deployed.z() * c, deployed.y(), deployed.z() * s};
}

FoldVertex unit_vertex(const UnitCell& cell, DeploymentAngle psi) {
  if (!cell.rectangular()) {
    throw Error(ErrorKind::InvalidConfig, "unit_vertex needs a rectangular cell; use splayed_vertex");
  }
  FoldVertex v;
  v.position = deploy_point(Vec3(cell.lx, 0.0, cell.lz), psi);
  return v;
}

namespace {

void check_isometry(std::span<const UnitCell> cells, double length, double tol) {
  double sx = 0.0;
  double sz = 0.0;
  for (const auto& c : cells) {
    sx += c.lx;
    sz += c.lz;
  }
  const double scale = std::max(1.0, std::abs(length));
  if (std::abs(sx - length) > tol * scale || std::abs(sz - length) > tol * scale) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "sum(lx) = " << sx << ", sum(lz) = " << sz << ", expected " << length;
    throw Error(ErrorKind::IsometryViolation, msg.str());
  }
}

}  // namespace

Vec3 chain_origin(double length, DeploymentAngle psi) {
  return deploy_point(Vec3(0.0, 0.0, length), psi);
}

std::vector<FoldVertex> chain_vertices(std::span<const UnitCell> cells, DeploymentAngle psi,
                                       double length, int slice_index, double tol) {
  check_isometry(cells, length, tol);
  std::vector<FoldVertex> out;
  out.reserve(cells.size());
  double cx = 0.0;
  double cz = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    cx += cells[i].lx;
    cz += cells[i].lz;
    FoldVertex v;
    v.position = deploy_point(Vec3(cx, 0.0, length - cz), psi);
    v.unit_index = static_cast<int>(i);
    v.slice_index = slice_index;
    out.push_back(v);
  }
  return out;
}

std::vector<Vec3> chain_corners(std::span<const UnitCell> cells, DeploymentAngle psi, double length) {
  std::vector<Vec3> out;
  out.reserve(cells.size());
  double cx = 0.0;
  double cz = 0.0;
  for (const auto& c : cells) {
    cx += c.lx;
    out.push_back(deploy_point(Vec3(cx, 0.0, length - cz), psi));
    cz += c.lz;
  }
  return out;
}

double splay_theta(double alpha, double psi) {
  const double t = alpha * std::cos(psi / 2.0);
  return std::atan2(2.0 * t, 1.0 - t * t);
}

Vec3 splayed_vertex(const UnitCell& cell, double psi) {
  const double t = cell.alpha * std::cos(psi / 2.0);
  const double den = 1.0 + t * t;
  const double w = cell.ly;
  return {w * (1.0 - t * t) / den, w * 2.0 * t / den, 0.0};
}

double strip_offset(double b1, double b3, double slope, double psi) {
  if (slope == 0.0) return 0.0;
  const double q = slope * std::cos(psi / 2.0);
  const double q2 = q * q;
  return (b1 - b3) / slope * (1.0 - (1.0 - q2) / (1.0 + q2));
}

namespace {

// Solves for (x, z) of a fold-intersection point with fixed y.
// a/b are the aligned fold (start, end), c/e the neighbouring fold.
Vec3 solve_intersection(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& e, double y,
                        double cos_gamma) {
  const Vec3 f1 = b - a;
  const Vec3 f2 = e - c;
  const double flen = f1.norm();
  if (flen == 0.0 || f2.norm() == 0.0) {
    throw Error(ErrorKind::SingularSystem, "coincident fold end points");
  }
  const Vec3 u = f1 / flen;
  // (a - O).f1 - (c - O).f2 = 0  ->  O.(f2 - f1) = c.f2 - a.f1
  // (a - O).u = flen cos_gamma  ->  O.u = a.u - flen cos_gamma
  const Vec3 n = f2 - f1;
  Mat2 m;
  m << n.x(), n.z(), u.x(), u.z();
  Vec2 rhs(c.dot(f2) - a.dot(f1) - n.y() * y, a.dot(u) - flen * cos_gamma - u.y() * y);

  Eigen::JacobiSVD<Mat2> svd(m);
  const auto sv = svd.singularValues();
  const double cond = sv(1) > 0.0 ? sv(0) / sv(1) : std::numeric_limits<double>::infinity();
  if (!(cond < 1e12)) {
    std::ostringstream msg;
    msg << "connector system is rank deficient (condition number " << cond << ")";
    throw Error(ErrorKind::SingularSystem, msg.str());
  }
  const Vec2 xz = m.partialPivLu().solve(rhs);
  return {xz(0), y, xz(1)};
}

}  // namespace

ConnectorSolve solve_connector(const std::array<Vec3, 4>& p, double slope, double psi) {
  if ((p[0] - p[1]).norm() == 0.0 || (p[2] - p[3]).norm() == 0.0) {
    throw Error(ErrorKind::SingularSystem, "P1 == P2 or P3 == P4");
  }
  ConnectorSolve out;
  out.p = p;
  out.d = strip_offset(p[0].z(), p[2].z(), slope, psi);
  const double cos_gamma = std::cos(std::atan(slope));

  out.o1 = solve_intersection(p[0], p[1], p[2], p[3], p[0].y() - out.d, cos_gamma);
  out.o2 = solve_intersection(p[1], p[0], p[3], p[2], p[1].y() + out.d, cos_gamma);

  auto residuals = [&](const Vec3& o, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& e) {
    const Vec3 f1 = b - a;
    const double align = (a - o).dot(f1) - (c - o).dot(e - c);
    const double incl = (a - o).dot(f1.normalized()) - f1.norm() * cos_gamma;
    return std::pair{align, incl};
  };
  const auto [r0, r1] = residuals(out.o1, p[0], p[1], p[2], p[3]);
  const auto [r2, r3] = residuals(out.o2, p[1], p[0], p[3], p[2]);
  out.residuals = {r0, r1, r2, r3};
  return out;
}

}  // namespace popup
