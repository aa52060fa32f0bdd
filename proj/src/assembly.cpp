#include "popup/assembly.hpp"

#include <unsupported/Eigen/AutoDiff>
#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "popup/augmented_lagrangian.hpp"
#include "popup/errors.hpp"

namespace popup {

void AssemblyParams::validate() const {
  if (!(r > 0) || !(phi > 0 && phi < kPi / 2) || !(lambda > 0)) {
    std::ostringstream msg;
    msg << "assembly parameters need r > 0, 0 < phi < pi/2, lambda > 0 (got r = " << r << ", phi = " << phi
        << ", lambda = " << lambda << ")";
    throw Error(ErrorKind::InvalidConfig, msg.str());
  }
}

UnitCell default_base_cell() { return {1.0, 1.0, 1.0 / kSqrt2, 0.0}; }

namespace {

void check_fan(const VertexStar& star) {
  Vec3 nsum = Vec3::Zero();
  const std::size_t k = star.ring.size();
  std::vector<Vec3> normals;
  for (std::size_t i = 0; i < k; ++i) {
    normals.push_back((star.ring[i] - star.center).cross(star.ring[(i + 1) % k] - star.center));
    nsum += normals.back();
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (!(normals[i].dot(nsum) > 0.0)) {
      std::ostringstream msg;
      msg << "triangle " << i << " of the five-cell star folds over its neighbours";
      throw Error(ErrorKind::InvalidAssembly, msg.str());
    }
  }
}

}  // namespace

std::pair<TriMesh, VertexStar> five_cell_assembly(const AssemblyParams& params, const UnitCell& base,
                                                  DeploymentAngle psi) {
  params.validate();
  if (!base.valid() || !base.rectangular() || std::abs(base.lx - base.lz) > 1e-12) {
    throw Error(ErrorKind::InvalidConfig, "five-cell base cell must be rectangular with lx == lz");
  }
  const auto [center, ring] =
      star::five_cell<double>(params.r, params.lambda, params.phi, psi.radians(), base.lx, base.ly);
  VertexStar s;
  s.center = center;
  s.ring.assign(ring.begin(), ring.end());
  s.closed = true;
  check_fan(s);
  TriMesh mesh = star_mesh(s);
  mesh.validate();
  return {std::move(mesh), std::move(s)};
}

CurvatureSample assembly_curvature(const AssemblyParams& params, double psi) {
  const auto [mesh, s] = five_cell_assembly(params, default_base_cell(), DeploymentAngle(psi));
  return star_curvature(s, VertexArea::Mixed);
}

namespace {

template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(count, std::thread::hardware_concurrency()));
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
}

double field_value(const std::string& field, double r, double lambda, double phi, double psi) {
  const CurvatureSample c = assembly_curvature({r, phi, lambda}, psi);
  return field == "K" ? c.K : c.H;
}

Vec2 bisect_edge(const std::string& field, const Vec2& a, const Vec2& b, double fa, double phi, double psi,
                 double tol) {
  double lo = 0.0;
  double hi = 1.0;
  const double len = (b - a).norm();
  while ((hi - lo) * len > tol) {
    const double mid = 0.5 * (lo + hi);
    const Vec2 p = a + mid * (b - a);
    double fm = 0.0;
    try {
      fm = field_value(field, p.x(), p.y(), phi, psi);
    } catch (const Error&) {
      break;
    }
    if ((fm >= 0.0) == (fa >= 0.0)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return a + 0.5 * (lo + hi) * (b - a);
}

}  // namespace

CurvatureMap curvature_map(const GridAxis& r_axis, const GridAxis& lambda_axis, const GridAxis& phi_axis,
                           double psi, double bisect_tol) {
  for (const auto* ax : {&r_axis, &lambda_axis, &phi_axis}) {
    if (ax->n < 1 || !(ax->max >= ax->min) || !std::isfinite(ax->min) || !std::isfinite(ax->max)) {
      throw Error(ErrorKind::InvalidConfig, "grid axes need n >= 1 and max >= min");
    }
  }
  if (!(r_axis.min > 0) || !(lambda_axis.min > 0) || !(phi_axis.min > 0) || !(phi_axis.max < kPi / 2)) {
    throw Error(ErrorKind::InvalidConfig, "grid bounds must satisfy r > 0, lambda > 0, 0 < phi < pi/2");
  }
  static_cast<void>(DeploymentAngle(psi));
  CurvatureMap map;
  map.r_axis = r_axis;
  map.lambda_axis = lambda_axis;
  map.phi_axis = phi_axis;
  map.psi = psi;
  const std::size_t total = static_cast<std::size_t>(r_axis.n) * lambda_axis.n * phi_axis.n;
  map.samples.resize(total);
  parallel_for(total, [&](std::size_t idx) {
    const int i = static_cast<int>(idx % r_axis.n);
    const int j = static_cast<int>((idx / r_axis.n) % lambda_axis.n);
    const int k = static_cast<int>(idx / (static_cast<std::size_t>(r_axis.n) * lambda_axis.n));
    GridSample& s = map.samples[idx];
    s.r = r_axis.at(i);
    s.lambda = lambda_axis.at(j);
    s.phi = phi_axis.at(k);
    try {
      const CurvatureSample c = assembly_curvature({s.r, s.phi, s.lambda}, psi);
      s.K = c.K;
      s.H = c.H;
      s.valid = true;
    } catch (const Error& e) {
      s.valid = false;
      s.error = e.what();
    }
  });

  // Marching squares per phi layer; crossings cached per edge so adjacent
  // cells share end points exactly.
  for (int k = 0; k < phi_axis.n; ++k) {
    const double phi = phi_axis.at(k);
    for (const std::string field : {"K", "H"}) {
      auto value = [&](int i, int j) {
        const GridSample& s = map.at(i, j, k);
        return field == "K" ? s.K : s.H;
      };
      std::map<std::array<int, 4>, Vec2> cache;
      auto crossing = [&](int i0, int j0, int i1, int j1) -> std::optional<Vec2> {
        const GridSample& a = map.at(i0, j0, k);
        const GridSample& b = map.at(i1, j1, k);
        if (!a.valid || !b.valid) return std::nullopt;
        const double fa = value(i0, j0);
        const double fb = value(i1, j1);
        if ((fa >= 0.0) == (fb >= 0.0)) return std::nullopt;
        const std::array<int, 4> key{i0, j0, i1, j1};
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        const Vec2 p = bisect_edge(field, {a.r, a.lambda}, {b.r, b.lambda}, fa, phi, psi, bisect_tol);
        cache.emplace(key, p);
        return p;
      };
      for (int j = 0; j + 1 < lambda_axis.n; ++j) {
        for (int i = 0; i + 1 < r_axis.n; ++i) {
          std::vector<Vec2> pts;
          for (auto e : {crossing(i, j, i + 1, j), crossing(i + 1, j, i + 1, j + 1), crossing(i, j + 1, i + 1, j + 1),
                         crossing(i, j, i, j + 1)}) {
            if (e) pts.push_back(*e);
          }
          for (std::size_t m = 0; m + 1 < pts.size(); m += 2) {
            map.contours.push_back({field, phi, pts[m], pts[m + 1]});
          }
        }
      }
    }
  }
  return map;
}

SplayStructure SplayStructure::designed() {
  SplayStructure s;
  s.alpha = {0.7, 1.75, 1.75, 0.0, 0.0};
  return s;
}

SplayStructure SplayStructure::uniform(double alpha) {
  SplayStructure s;
  s.alpha.fill(alpha);
  return s;
}

VertexStar SplayStructure::star(double psi) const {
  const Vec3 common = unit_vertex(base, DeploymentAngle(psi)).position;
  auto vertex = [&](int cell, const Vec3& grid) {
    UnitCell c = base;
    c.ly = width;
    c.alpha = alpha[cell];
    const Vec3 sv = splayed_vertex(c, psi);
    return Vec3(grid + common + Vec3(sv.x() - width, 0.0, sv.y()));
  };
  const double p = spacing;
  VertexStar s;
  s.center = vertex(0, Vec3::Zero());
  s.ring = {vertex(2, Vec3(p, 0, 0)), vertex(4, Vec3(0, p, 0)), vertex(1, Vec3(-p, 0, 0)), vertex(3, Vec3(0, -p, 0))};
  s.closed = true;
  return s;
}

CurvatureTrace curvature_trace(const SplayStructure& structure, const std::vector<double>& psi_schedule,
                               double zero_tol) {
  CurvatureTrace out;
  auto K = [&](double psi) { return angle_defect(structure.star(psi)); };
  double last_psi = 0.0;
  int last_sign = 0;
  for (double psi : psi_schedule) {
    const double k = K(psi);
    out.samples.push_back({psi, k});
    if (std::abs(k) <= zero_tol) continue;
    const int sign = k > 0 ? 1 : -1;
    if (last_sign != 0 && sign != last_sign) {
      double lo = last_psi;
      double hi = psi;
      while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        ((K(mid) > 0) == (last_sign > 0) ? lo : hi) = mid;
      }
      out.sign_changes.push_back(0.5 * (lo + hi));
    }
    last_sign = sign;
    last_psi = psi;
  }
  return out;
}

namespace {

using AD = Eigen::AutoDiffScalar<Eigen::Vector2d>;

struct EvalKH {
  AD K;
  AD H;
};

EvalKH eval_kh(const AD& r, const AD& lambda, double phi, double psi) {
  const UnitCell base = default_base_cell();
  const auto [c, ring] = star::five_cell<AD>(r, lambda, phi, psi, base.lx, base.ly);
  const std::span<const star::V3<AD>> rs(ring.data(), ring.size());
  const AD K = star::angle_defect<AD>(c, rs);
  const auto mc = star::mean_curvature<AD>(c, rs, VertexArea::Mixed);
  return {K, mc.H};
}

}  // namespace

double curvature_loss(const CurvatureTarget& target, double weight_K, double weight_H, const Vec2& x, Vec2* grad) {
  const AD r(x(0), 2, 0);
  const AD lambda(x(1), 2, 1);
  AD loss = assembly_regularizer<AD>(r, lambda, target.phi);
  if (target.K || target.H) {
    const EvalKH kh = eval_kh(r, lambda, target.phi, target.psi);
    if (target.K) loss += weight_K * (kh.K - *target.K) * (kh.K - *target.K);
    if (target.H) loss += weight_H * (kh.H - *target.H) * (kh.H - *target.H);
  }
  if (grad) *grad = loss.derivatives();
  return loss.value();
}

CurvatureDesign optimize_assembly_curvature(const CurvatureTarget& target, const CurvatureBox& box) {
  if (!(target.weight_K >= 0) || !(target.weight_H >= 0)) {
    throw Error(ErrorKind::InvalidConfig, "curvature weights must be non-negative");
  }
  if (!(target.phi > 0 && target.phi < kPi / 2)) throw Error(ErrorKind::InvalidConfig, "phi must be in (0, pi/2)");
  static_cast<void>(DeploymentAngle(target.psi));

  // Sweep the box: attainable range and a starting point.
  const int n = 81;
  double kmin = std::numeric_limits<double>::infinity();
  double kmax = -kmin;
  double hmin = kmin;
  double hmax = -kmin;
  Vec2 start(box.r_min, box.lambda_min);
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double r = box.r_min + (box.r_max - box.r_min) * i / (n - 1);
      const double l = box.lambda_min + (box.lambda_max - box.lambda_min) * j / (n - 1);
      CurvatureSample c;
      try {
        c = assembly_curvature({r, target.phi, l}, target.psi);
      } catch (const Error&) {
        continue;
      }
      kmin = std::min(kmin, c.K);
      kmax = std::max(kmax, c.K);
      hmin = std::min(hmin, c.H);
      hmax = std::max(hmax, c.H);
      double v = assembly_regularizer<double>(r, l, target.phi);
      if (target.K) v += target.weight_K * (c.K - *target.K) * (c.K - *target.K);
      if (target.H) v += target.weight_H * (c.H - *target.H) * (c.H - *target.H);
      if (v < best) {
        best = v;
        start = Vec2(r, l);
      }
    }
  }
  auto unattainable = [](const char* name, double want, double lo, double hi) {
    std::ostringstream msg;
    msg << name << " = " << want << " outside the attainable range [" << lo << ", " << hi
        << "]; nearest achievable " << std::clamp(want, lo, hi);
    throw Error(ErrorKind::Unattainable, msg.str());
  };
  if (target.K && (*target.K < kmin || *target.K > kmax)) unattainable("K", *target.K, kmin, kmax);
  if (target.H && (*target.H < hmin || *target.H > hmax)) unattainable("H", *target.H, hmin, hmax);

  CurvatureDesign out;
  Vec2 x = start;
  double wk = target.weight_K;
  double wh = target.weight_H;
  for (int round = 0; round < 8; ++round) {
    const opt::Objective f = [&](const opt::Vector& z, opt::Vector* g) {
      if (!(z(0) >= box.r_min && z(0) <= box.r_max && z(1) >= box.lambda_min && z(1) <= box.lambda_max)) {
        return std::numeric_limits<double>::infinity();
      }
      try {
        Vec2 gz;
        const double v = curvature_loss(target, wk, wh, Vec2(z(0), z(1)), g ? &gz : nullptr);
        if (g) *g = gz;
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
      } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    opt::BfgsOptions bo;
    bo.max_iterations = 500;
    bo.grad_tol = 1e-10;
    const opt::BfgsResult res = opt::bfgs(f, opt::Vector(x), bo);
    x = Vec2(res.x(0), res.x(1));
    out.iterations += res.iterations;
    const CurvatureSample c = assembly_curvature({x(0), target.phi, x(1)}, target.psi);
    const bool k_ok = !target.K || std::abs(c.K - *target.K) <= target.tol_K;
    const bool h_ok = !target.H || std::abs(c.H - *target.H) <= target.tol_K;
    if (k_ok && h_ok) break;
    if (!k_ok) wk = std::max(wk, 1.0) * 10.0;
    if (!h_ok) wh = std::max(wh, 1.0) * 10.0;
  }
  const CurvatureSample c = assembly_curvature({x(0), target.phi, x(1)}, target.psi);
  out.r = x(0);
  out.lambda = x(1);
  out.K = c.K;
  out.H = c.H;
  out.regularizer = assembly_regularizer<double>(x(0), x(1), target.phi);
  out.loss = curvature_loss(target, target.weight_K, target.weight_H, x, nullptr);
  return out;
}

}  // namespace popup
