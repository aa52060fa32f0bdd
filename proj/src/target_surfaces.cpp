#include "popup/target_surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>

#include "popup/errors.hpp"

namespace popup {

std::string to_string(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::Plane: return "plane";
    case SurfaceKind::Cylinder: return "cylinder";
    case SurfaceKind::SphericalCap: return "sphere";
    case SurfaceKind::Saddle: return "saddle";
    case SurfaceKind::Composite: return "composite";
    case SurfaceKind::Sampled: return "sampled";
  }
  return "unknown";
}

namespace {

std::size_t bracket(const std::vector<double>& axis, double v) {
  auto it = std::upper_bound(axis.begin(), axis.end(), v);
  std::size_t i = it == axis.begin() ? 0 : static_cast<std::size_t>(it - axis.begin()) - 1;
  return std::min(i, axis.size() - 2);
}

[[noreturn]] void out_of_domain(double v, double lo, double hi, const char* what) {
  std::ostringstream msg;
  msg << what << " " << v << " outside [" << lo << ", " << hi << "]";
  throw Error(ErrorKind::DomainExceeded, msg.str());
}

}  // namespace

double SampledGrid::eval(double x, double y) const {
  const double eps = 1e-12;
  if (x < xs.front() - eps || x > xs.back() + eps) out_of_domain(x, xs.front(), xs.back(), "x");
  if (y < ys.front() - eps || y > ys.back() + eps) out_of_domain(y, ys.front(), ys.back(), "y");
  const std::size_t i = bracket(xs, x);
  const std::size_t j = bracket(ys, y);
  const double tx = std::clamp((x - xs[i]) / (xs[i + 1] - xs[i]), 0.0, 1.0);
  const double ty = std::clamp((y - ys[j]) / (ys[j + 1] - ys[j]), 0.0, 1.0);
  return (1 - tx) * (1 - ty) * at(i, j) + tx * (1 - ty) * at(i + 1, j) + (1 - tx) * ty * at(i, j + 1) +
         tx * ty * at(i + 1, j + 1);
}

SampledGrid read_sampled_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open sampled grid " + path);
  std::string line;
  std::getline(in, line);
  if (line.rfind("x,y,z", 0) != 0) throw Error(ErrorKind::InvalidConfig, path + ": expected header x,y,z");
  std::map<std::pair<double, double>, double> pts;
  std::set<double> xs;
  std::set<double> ys;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x = 0, y = 0, z = 0;
    if (!(row >> x >> y >> z)) {
      std::ostringstream msg;
      msg << path << ":" << lineno << ": malformed row";
      throw Error(ErrorKind::InvalidConfig, msg.str());
    }
    pts[{x, y}] = z;
    xs.insert(x);
    ys.insert(y);
  }
  SampledGrid g;
  g.xs.assign(xs.begin(), xs.end());
  g.ys.assign(ys.begin(), ys.end());
  if (g.xs.size() < 2 || g.ys.size() < 2 || pts.size() != g.xs.size() * g.ys.size()) {
    throw Error(ErrorKind::InvalidConfig, path + ": samples do not form a full rectangular grid");
  }
  for (double y : g.ys) {
    for (double x : g.xs) g.z.push_back(pts.at({x, y}));
  }
  return g;
}

TargetSurface TargetSurface::plane(double length, double y_min, double y_max) {
  if (!(length > 0)) throw Error(ErrorKind::InvalidConfig, "plane length must be positive");
  TargetSurface s;
  s.kind_ = SurfaceKind::Plane;
  s.length_ = length;
  s.field_ = [length](double x, double) { return length - x; };
  s.lo_ = y_min;
  s.hi_ = y_max;
  return s;
}

TargetSurface TargetSurface::cylinder(double radius, double y_min, double y_max) {
  if (!(radius > 0)) throw Error(ErrorKind::InvalidConfig, "cylinder radius must be positive");
  TargetSurface s;
  s.kind_ = SurfaceKind::Cylinder;
  s.profile_ = [radius](double) { return radius; };
  s.lo_ = y_min;
  s.hi_ = y_max;
  return s;
}

TargetSurface TargetSurface::spherical_cap(double radius, double center, double margin) {
  if (!(radius > 0) || !(margin > 0) || margin >= radius) {
    throw Error(ErrorKind::InvalidConfig, "sphere needs radius > margin > 0");
  }
  TargetSurface s;
  s.kind_ = SurfaceKind::SphericalCap;
  s.profile_ = [radius, center](double z) {
    const double d = z - center;
    return std::sqrt(std::max(0.0, radius * radius - d * d));
  };
  s.lo_ = center - radius + margin;
  s.hi_ = center + radius - margin;
  return s;
}

TargetSurface TargetSurface::saddle(double waist, double slope, double center, double half_extent) {
  if (!(waist > 0) || !(half_extent > 0)) {
    throw Error(ErrorKind::InvalidConfig, "saddle needs waist > 0 and half_extent > 0");
  }
  TargetSurface s;
  s.kind_ = SurfaceKind::Saddle;
  s.profile_ = [waist, slope, center](double z) {
    const double d = slope * (z - center);
    return std::sqrt(waist * waist + d * d);
  };
  s.lo_ = center - half_extent;
  s.hi_ = center + half_extent;
  return s;
}

TargetSurface TargetSurface::sampled(SampledGrid grid, double length) {
  if (!(length > 0)) throw Error(ErrorKind::InvalidConfig, "sampled surface length must be positive");
  if (grid.xs.front() > 1e-12 || grid.xs.back() < length - 1e-12) {
    throw Error(ErrorKind::DomainExceeded, "sampled grid must cover x in [0, L]");
  }
  TargetSurface s;
  s.kind_ = SurfaceKind::Sampled;
  s.length_ = length;
  s.lo_ = grid.ys.front();
  s.hi_ = grid.ys.back();
  auto shared = std::make_shared<SampledGrid>(std::move(grid));
  s.field_ = [shared](double x, double y) { return shared->eval(x, y); };
  return s;
}

double TargetSurface::radius(double z) const {
  if (!profile_) throw Error(ErrorKind::InvalidConfig, to_string(kind_) + " surface has no radius profile");
  if (z < lo_ - 1e-12 || z > hi_ + 1e-12) out_of_domain(z, lo_, hi_, "profile coordinate");
  return profile_(std::clamp(z, lo_, hi_));
}

double TargetSurface::height(double x, double y) const {
  if (!field_) throw Error(ErrorKind::InvalidConfig, to_string(kind_) + " surface is not a height field");
  return field_(x, y);
}

TargetSurface& TargetSurface::set_position_map(double z0, double scale) {
  z0_ = z0;
  scale_ = scale;
  return *this;
}

double composite_piece(int piece, double z, double r1, double r2, double r3, double length) {
  const double L = length;
  switch (piece) {
    case 0: return r1 + (r2 - r1) * 0.5 * (1.0 + std::cos(kPi * (z + L) / L));
    case 1: return r2 + (r3 - r2) * 0.5 * (1.0 + std::sin(kPi * z / (2.0 * L)));
    case 2: return r3 + (r2 - r3) * 0.5 * (1.0 - std::cos(kPi * (z - L) / L));
    default: throw Error(ErrorKind::InvalidConfig, "composite profile has pieces 0..2");
  }
}

TargetSurface composite_profile(double r1, double r2, double r3, double length) {
  if (!(r1 > r3 && r3 > r2 && r2 > 0.0)) {
    std::ostringstream msg;
    msg << "composite radii need R1 > R3 > R2 > 0, got " << r1 << ", " << r2 << ", " << r3;
    throw Error(ErrorKind::OrderingViolation, msg.str());
  }
  if (!(length > 0)) throw Error(ErrorKind::InvalidConfig, "composite length must be positive");
  TargetSurface s;
  s.kind_ = SurfaceKind::Composite;
  s.length_ = length;
  s.lo_ = -2.0 * length;
  s.hi_ = 2.0 * length;
  s.profile_ = [=](double z) {
    const int piece = z <= -length ? 0 : (z <= length ? 1 : 2);
    return composite_piece(piece, z, r1, r2, r3, length);
  };
  return s;
}

SliceSpec SliceSpec::uniform(int n, int slices, double width) {
  SliceSpec spec;
  spec.n = n;
  spec.widths.assign(static_cast<std::size_t>(std::max(slices, 0)), width);
  return spec;
}

std::vector<double> SliceSpec::positions() const {
  std::vector<double> s(widths.size() + 1, 0.0);
  for (std::size_t j = 0; j < widths.size(); ++j) s[j + 1] = s[j] + widths[j];
  return s;
}

double SliceSpec::total_width() const { return std::accumulate(widths.begin(), widths.end(), 0.0); }

void SliceSpec::validate() const {
  if (n < 1) throw Error(ErrorKind::InvalidConfig, "units per slice N must be >= 1");
  if (widths.empty()) throw Error(ErrorKind::InvalidConfig, "slice count must be >= 1");
  for (std::size_t j = 0; j < widths.size(); ++j) {
    if (!(widths[j] > 0) || !std::isfinite(widths[j])) {
      std::ostringstream msg;
      msg << "slice width " << j << " must be positive";
      throw Error(ErrorKind::InvalidConfig, msg.str());
    }
  }
  if (!(length > 0)) throw Error(ErrorKind::InvalidConfig, "slice length must be positive");
}

SliceCurve SliceCurve::arc(double radius) {
  SliceCurve c;
  c.kind = CurveKind::Arc;
  c.length = radius;
  c.f = [radius](double x) { return std::sqrt(std::max(0.0, radius * radius - x * x)); };
  c.df = [radius](double x) {
    const double z = std::sqrt(std::max(0.0, radius * radius - x * x));
    return z > 0 ? -x / z : -1e300;
  };
  return c;
}

SliceCurve SliceCurve::line(double length) {
  SliceCurve c;
  c.kind = CurveKind::Graph;
  c.length = length;
  c.f = [length](double x) { return length - x; };
  c.df = [](double) { return -1.0; };
  return c;
}

double SliceCurve::eval(double x) const { return f(x); }

std::vector<SliceCurve> slice(const TargetSurface& surface, const SliceSpec& spec) {
  spec.validate();
  const auto s = spec.positions();
  std::vector<SliceCurve> out;
  out.reserve(spec.widths.size());
  for (std::size_t j = 0; j < spec.widths.size(); ++j) {
    const double zc = surface.surface_coordinate(s[j]);
    if (zc < surface.domain_min() - 1e-12 || zc > surface.domain_max() + 1e-12) {
      std::ostringstream msg;
      msg << "slice " << j << " at s = " << s[j] << " maps to " << zc << " outside ["
          << surface.domain_min() << ", " << surface.domain_max() << "]";
      throw Error(ErrorKind::DomainExceeded, msg.str());
    }
    SliceCurve c;
    if (surface.axisymmetric()) {
      c = SliceCurve::arc(surface.radius(zc));
    } else if (surface.kind() == SurfaceKind::Plane) {
      c = SliceCurve::line(surface.length());
    } else {
      const double L = surface.length();
      const double y = zc;
      c.kind = CurveKind::Graph;
      c.length = L;
      auto surf = std::make_shared<TargetSurface>(surface);
      c.f = [surf, y](double x) { return surf->height(x, y); };
      const double h = 1e-6 * L;
      c.df = [surf, y, h, L](double x) {
        const double a = std::max(0.0, x - h);
        const double b = std::min(L, x + h);
        return (surf->height(b, y) - surf->height(a, y)) / (b - a);
      };
      const double tol = 1e-6 * L;
      if (std::abs(c.f(0.0) - L) > tol || std::abs(c.f(L)) > tol) {
        std::ostringstream msg;
        msg << "sampled slice " << j << " must run from (0, L) to (L, 0) with L = " << L;
        throw Error(ErrorKind::DomainExceeded, msg.str());
      }
      const int samples = 256;
      double prev = c.f(0.0);
      for (int k = 1; k <= samples; ++k) {
        const double z = c.f(L * k / samples);
        if (z > prev + 1e-12) {
          std::ostringstream msg;
          msg << "sampled slice " << j << " is not monotone near x = " << L * k / samples;
          throw Error(ErrorKind::OrderingViolation, msg.str());
        }
        prev = z;
      }
    }
    c.index = static_cast<int>(j);
    c.y = s[j];
    c.width = spec.widths[j];
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<double> region_widths(const TargetSurface& profile, int n, double length) {
  if (profile.kind() != SurfaceKind::Composite) {
    throw Error(ErrorKind::InvalidConfig, "region widths are defined for the composite profile");
  }
  if (n < 1) throw Error(ErrorKind::InvalidConfig, "N must be >= 1");
  return {length / n, length / (3.0 * n), length / (2.0 * n)};
}

void check_stitch(double r1, double r2, double r3, double length, int boundary, double tol) {
  if (boundary != 0 && boundary != 1) throw Error(ErrorKind::InvalidConfig, "stitch boundary is 0 or 1");
  const double z = boundary == 0 ? -length : length;
  const double a = composite_piece(boundary, z, r1, r2, r3, length);
  const double b = composite_piece(boundary + 1, z, r1, r2, r3, length);
  if (std::abs(a - b) > tol) {
    std::ostringstream msg;
    msg.precision(12);
    msg << "regions " << boundary << " and " << boundary + 1 << " meet with radii " << a << " and " << b;
    throw Error(ErrorKind::StitchMismatch, msg.str());
  }
}

std::vector<RegionPatch> composite_patches(double r1, double r2, double r3, double length, int n,
                                           const std::array<int, 3>& counts,
                                           const std::array<double, 3>& widths) {
  const TargetSurface full = composite_profile(r1, r2, r3, length);
  const std::array<double, 4> edges{-2.0 * length, -length, length, 2.0 * length};
  std::vector<RegionPatch> out;
  for (int k = 0; k < 3; ++k) {
    RegionPatch p;
    p.region = k;
    p.z_begin = edges[k];
    p.z_end = edges[k + 1];
    p.spec = SliceSpec::uniform(n, counts[k], widths[k]);
    p.spec.validate();
    p.surface = full;
    p.surface.lo_ = p.z_begin;
    p.surface.hi_ = p.z_end;
    p.surface.set_position_map(p.z_begin, (p.z_end - p.z_begin) / p.spec.total_width());
    out.push_back(std::move(p));
  }
  check_stitch(r1, r2, r3, length, 0);
  check_stitch(r1, r2, r3, length, 1);
  return out;
}

}  // namespace popup
