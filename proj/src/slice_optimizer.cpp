#include "popup/slice_optimizer.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "popup/errors.hpp"

namespace popup {

void SolverConfig::validate() const {
  if (!(tol_eq > 0) || !(tol_kkt > 0)) throw Error(ErrorKind::InvalidConfig, "solver tolerances must be positive");
  if (max_outer < 1 || max_inner < 1) throw Error(ErrorKind::InvalidConfig, "solver iteration budgets must be >= 1");
  if (!(penalty > 0) || !(penalty_growth > 1)) {
    throw Error(ErrorKind::InvalidConfig, "penalty must be positive and its growth factor > 1");
  }
  if (!(min_length >= 0) || min_length >= 1) throw Error(ErrorKind::InvalidConfig, "min_length must be in [0, 1)");
}

double ConstraintResiduals::max() const {
  return std::max({isometry, on_curve, positivity, ordering, admissible});
}

double loss_eval(std::span<const double> lx, std::span<const double> lz, double delta) {
  double v = 0.0;
  for (auto l : {lx, lz}) {
    for (std::size_t i = 0; i < l.size(); ++i) {
      if (i > 0) v += (l[i] - l[i - 1]) * (l[i] - l[i - 1]);
      v += (l[i] - delta) * (l[i] - delta);
    }
  }
  return v;
}

double loss_eval(const SliceDesign& design, double delta) {
  std::vector<double> lx;
  std::vector<double> lz;
  for (const auto& c : design.cells) {
    lx.push_back(c.lx);
    lz.push_back(c.lz);
  }
  return loss_eval(lx, lz, delta);
}

double loss_with_gradient(const opt::Vector& p, double delta, opt::Vector* grad) {
  const Eigen::Index n = p.size() / 2;
  double v = 0.0;
  if (grad) grad->setZero(p.size());
  for (Eigen::Index half = 0; half < 2; ++half) {
    const Eigen::Index o = half * n;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = p(o + i) - delta;
      v += u * u;
      if (grad) (*grad)(o + i) += 2.0 * u;
      if (i > 0) {
        const double d = p(o + i) - p(o + i - 1);
        v += d * d;
        if (grad) {
          (*grad)(o + i) += 2.0 * d;
          (*grad)(o + i - 1) -= 2.0 * d;
        }
      }
    }
  }
  return v;
}

opt::Vector slice_equalities(const opt::Vector& p, const SliceCurve& unit_curve, opt::Matrix* jac) {
  const Eigen::Index n = p.size() / 2;
  const Eigen::Index m = 2 + (n - 1);
  opt::Vector c(m);
  if (jac) jac->setZero(m, p.size());
  c(0) = p.head(n).sum() - 1.0;
  c(1) = p.tail(n).sum() - 1.0;
  if (jac) {
    jac->row(0).head(n).setOnes();
    jac->row(1).tail(n).setOnes();
  }
  double x = 0.0;
  double z = 1.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    x += p(i);
    z -= p(n + i);
    double dx = 0.0;
    double dz = 0.0;
    if (unit_curve.kind == CurveKind::Arc) {
      const double rho = std::hypot(x, z);
      c(2 + i) = 1.0 - rho;
      dx = rho > 0 ? -x / rho : 0.0;
      dz = rho > 0 ? z / rho : 0.0;
    } else {
      const double xc = std::clamp(x, 0.0, 1.0);
      const double L = unit_curve.length;
      c(2 + i) = z - unit_curve.f(xc * L) / L;
      dx = -unit_curve.df(xc * L);
      dz = -1.0;
    }
    if (jac) {
      for (Eigen::Index k = 0; k <= i; ++k) {
        (*jac)(2 + i, k) = dx;
        (*jac)(2 + i, n + k) = dz;
      }
    }
  }
  return c;
}

opt::Vector slice_inequalities(const opt::Vector& p, double min_length, opt::Matrix* jac) {
  const Eigen::Index n = p.size() / 2;
  const Eigen::Index m = 2 * n + (n - 1) + n;
  opt::Vector g(m);
  if (jac) jac->setZero(m, p.size());
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    g(i) = p(i) - min_length;
    if (jac) (*jac)(i, i) = 1.0;
  }
  // deployed x_{i+1} - x_i = lx_{i+1}
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    g(2 * n + i) = p(i + 1);
    if (jac) (*jac)(2 * n + i, i + 1) = 1.0;
  }
  double x = 0.0;
  double z = 1.0;
  const Eigen::Index o = 3 * n - 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    x += p(i);
    z -= p(n + i);
    g(o + i) = 2.0 - x * x - z * z;
    if (jac) {
      for (Eigen::Index k = 0; k <= i; ++k) {
        (*jac)(o + i, k) = -2.0 * x;
        (*jac)(o + i, n + k) = 2.0 * z;
      }
    }
  }
  return g;
}

namespace {

SliceCurve normalized(const SliceCurve& curve) {
  if (curve.kind == CurveKind::Arc) {
    SliceCurve u = SliceCurve::arc(1.0);
    return u;
  }
  return curve;  // graph curves are scaled inside slice_equalities
}

opt::Vector project_uniform(int n, const SliceCurve& unit) {
  opt::Vector p = opt::Vector::Constant(2 * n, 1.0 / n);
  for (int it = 0; it < 50; ++it) {
    opt::Matrix j;
    const opt::Vector c = slice_equalities(p, unit, &j);
    if (c.lpNorm<Eigen::Infinity>() < 1e-13) break;
    const opt::Vector step = j.completeOrthogonalDecomposition().solve(c);
    const opt::Vector next = p - step;
    if ((next.array() <= 0.0).any()) break;
    p = next;
  }
  return p;
}

std::string worst_family(const ConstraintResiduals& r) {
  std::pair<double, const char*> fam[] = {{r.isometry, "isometry"},
                                          {r.on_curve, "on-curve"},
                                          {r.positivity, "positivity"},
                                          {r.ordering, "ordering"},
                                          {r.admissible, "admissible region"}};
  auto it = std::max_element(std::begin(fam), std::end(fam),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
  std::ostringstream msg;
  msg << it->second << " residual " << it->first;
  return msg.str();
}

SliceDesign build_design(const SliceCurve& curve, const opt::Vector& p, int n) {
  SliceDesign d;
  d.slice = curve.index;
  d.y = curve.y;
  d.width = curve.width;
  d.length = curve.length;
  const double L = curve.length;
  for (int i = 0; i < n; ++i) d.cells.push_back({p(i) * L, p(n + i) * L, curve.width, 0.0});
  // Close the sums exactly in physical units.
  double sx = 0.0;
  double sz = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    sx += d.cells[i].lx;
    sz += d.cells[i].lz;
  }
  d.cells.back().lx = std::abs(L - sx - d.cells.back().lx) < 1e-7 * L ? L - sx : d.cells.back().lx;
  d.cells.back().lz = std::abs(L - sz - d.cells.back().lz) < 1e-7 * L ? L - sz : d.cells.back().lz;
  // Non-isometric iterates are left without vertices; the residual check rejects them.
  try {
    d.vertices = chain_vertices(d.cells, DeploymentAngle::deployed(), L, curve.index, 1e-6);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::IsometryViolation) throw;
  }
  return d;
}

}  // namespace

ConstraintResiduals design_residuals(const SliceDesign& design, const SliceCurve& curve, double min_length) {
  ConstraintResiduals r;
  const double L = design.length;
  double sx = 0.0;
  double sz = 0.0;
  double prev_x = 0.0;
  const std::size_t n = design.cells.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = design.cells[i];
    sx += c.lx;
    sz += c.lz;
    r.positivity = std::max({r.positivity, min_length * L - c.lx, min_length * L - c.lz});
    const double x = sx;
    const double z = L - sz;
    r.ordering = std::max(r.ordering, prev_x - x);
    prev_x = x;
    r.admissible = std::max(r.admissible, std::hypot(x, z) - kSqrt2 * L);
    if (i + 1 < n) {
      const double dev = curve.kind == CurveKind::Arc ? std::abs(curve.length - std::hypot(x, z))
                                                      : std::abs(z - curve.f(std::clamp(x, 0.0, L)));
      r.on_curve = std::max(r.on_curve, dev);
    }
  }
  r.isometry = std::max(std::abs(sx - L), std::abs(sz - L));
  return r;
}

SliceDesign optimize_slice_flagged(const SliceCurve& curve, int n, const SolverConfig& config) {
  config.validate();
  if (n < 1) throw Error(ErrorKind::InvalidConfig, "units per slice N must be >= 1");
  if (!(curve.length > 0)) throw Error(ErrorKind::InvalidConfig, "slice length must be positive");
  const double delta = 1.0 / n;
  if (n * config.min_length > 1.0) {
    std::ostringstream msg;
    msg << "slice " << curve.index << ": " << n << " cuts of at least " << config.min_length
        << " L cannot sum to L";
    throw Error(ErrorKind::Infeasible, msg.str());
  }

  if (n == 1) {
    opt::Vector p(2);
    p << 1.0, 1.0;
    SliceDesign d = build_design(curve, p, 1);
    d.loss = 0.0;
    d.residuals = design_residuals(d, curve, config.min_length);
    d.loss_trajectory = {0.0};
    return d;
  }

  const SliceCurve unit = normalized(curve);
  opt::Problem prob;
  prob.n = 2 * n;
  prob.objective = [delta](const opt::Vector& p, opt::Vector* g) {
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      if (!std::isfinite(p(i))) return std::numeric_limits<double>::infinity();
    }
    return loss_with_gradient(p, delta, g);
  };
  prob.equalities = [&unit](const opt::Vector& p, opt::Matrix* j) { return slice_equalities(p, unit, j); };
  const double min_len = config.min_length;
  prob.inequalities = [min_len](const opt::Vector& p, opt::Matrix* j) { return slice_inequalities(p, min_len, j); };

  opt::AlmOptions ao;
  ao.tol_eq = config.tol_eq * 0.01;
  ao.tol_kkt = config.tol_kkt * 0.01;
  ao.max_outer = config.max_outer;
  ao.max_inner = config.max_inner;
  ao.penalty = config.penalty;
  ao.penalty_growth = config.penalty_growth;
  const opt::AlmResult res = opt::minimize(prob, project_uniform(n, unit), ao);

  SliceDesign d = build_design(curve, res.x, n);
  d.loss = res.f;
  d.kkt = res.kkt;
  d.outer_iterations = res.outer_iterations;
  d.inner_iterations = res.inner_iterations;
  d.loss_trajectory = res.objective_trajectory;
  d.residuals = design_residuals(d, curve, config.min_length);
  const double scale = std::max(1.0, curve.length);
  if (d.residuals.max() > 1e-4 * scale) {
    std::ostringstream msg;
    msg << "slice " << curve.index << " with N = " << n << ": constraints not satisfiable, worst "
        << worst_family(d.residuals);
    throw Error(ErrorKind::Infeasible, msg.str());
  }
  d.converged = d.residuals.max() <= config.tol_eq * scale && d.kkt <= config.tol_kkt;
  return d;
}

SliceDesign optimize_slice(const SliceCurve& curve, int n, const SolverConfig& config) {
  SliceDesign d = optimize_slice_flagged(curve, n, config);
  if (!d.converged) {
    std::ostringstream msg;
    msg << "slice " << curve.index << " with N = " << n << " stopped after " << d.outer_iterations
        << " outer iterations; worst " << worst_family(d.residuals) << ", kkt " << d.kkt;
    throw Error(ErrorKind::MaxIterations, msg.str());
  }
  return d;
}

std::vector<SliceDesign> optimize_slices(std::span<const SliceCurve> curves, int n, const SolverConfig& config) {
  config.validate();
  const std::size_t count = curves.size();
  std::vector<SliceDesign> out(count);
  std::vector<std::exception_ptr> errors(count);
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(count, std::thread::hardware_concurrency()));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t j = w; j < count; j += workers) {
          try {
            out[j] = optimize_slice(curves[j], n, config);
          } catch (...) {
            errors[j] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

AzimuthalError azimuthal_error(const SliceDesign& design) {
  AzimuthalError out;
  const std::size_t n = design.cells.size();
  const double L = design.length;
  const double dphi = kPi / (2.0 * static_cast<double>(n));
  double sx = 0.0;
  double sz_prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += design.cells[i].lx;
    const double phi = std::atan2(sx, L - sz_prev);
    sz_prev += design.cells[i].lz;
    const double e = phi - (static_cast<double>(i) + 0.5) * dphi;
    out.raw.push_back(e * e);
  }
  double mean = 0.0;
  for (double v : out.raw) mean += v;
  mean /= static_cast<double>(n);
  out.flat = !(mean > 1e-300);
  for (double v : out.raw) out.normalized.push_back(out.flat ? 1.0 : v / mean);
  return out;
}

std::vector<ConvergencePoint> convergence_study(const SliceCurve& curve, std::span<const int> n_list,
                                                const SolverConfig& config) {
  std::vector<ConvergencePoint> out;
  for (int n : n_list) {
    const SliceDesign d = optimize_slice(curve, n, config);
    out.push_back({n, 1.0 / n, d.loss});
  }
  return out;
}

void write_report(std::ostream& os, std::span<const SliceDesign> designs) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(9);
  for (const auto& d : designs) {
    os << "slice " << d.slice << " n " << d.cells.size() << " length " << d.length << " loss " << d.loss
       << " isometry " << d.residuals.isometry << " on_curve " << d.residuals.on_curve << " positivity "
       << d.residuals.positivity << " ordering " << d.residuals.ordering << " admissible "
       << d.residuals.admissible << " kkt " << d.kkt << " outer " << d.outer_iterations << " inner "
       << d.inner_iterations << " converged " << (d.converged ? 1 : 0) << "\n";
    os << "trajectory " << d.slice;
    for (double v : d.loss_trajectory) os << " " << v;
    os << "\n";
    for (std::size_t i = 0; i < d.cells.size(); ++i) {
      os << "cell " << d.slice << " " << i << " " << d.cells[i].lx << " " << d.cells[i].lz << " "
         << d.cells[i].ly << "\n";
    }
  }
  os.flags(flags);
  os.precision(prec);
}

}  // namespace popup
