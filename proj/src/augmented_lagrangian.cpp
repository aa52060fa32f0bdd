#include "popup/augmented_lagrangian.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace popup::opt {

BfgsResult bfgs(const Objective& f, Vector x0, const BfgsOptions& options) {
  const Eigen::Index n = x0.size();
  BfgsResult out;
  Vector g(n);
  double fx = f(x0, &g);
  Matrix hinv = Matrix::Identity(n, n);
  bool fresh = true;
  Vector x = std::move(x0);
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    if (!std::isfinite(fx)) break;
    if (g.lpNorm<Eigen::Infinity>() <= options.grad_tol) {
      out.converged = true;
      break;
    }
    Vector p = -hinv * g;
    double slope = g.dot(p);
    if (!(slope < 0.0)) {
      hinv.setIdentity();
      fresh = true;
      p = -g;
      slope = -g.squaredNorm();
    }
    double step = 1.0;
    Vector xn(n);
    Vector gn(n);
    double fn = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int k = 0; k < 80; ++k) {
      xn = x + step * p;
      fn = f(xn, &gn);
      if (std::isfinite(fn) && fn <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (fresh) break;
      hinv.setIdentity();
      fresh = true;
      continue;
    }
    const Vector s = xn - x;
    const Vector y = gn - g;
    const double sy = s.dot(y);
    x = xn;
    const double df = fx - fn;
    fx = fn;
    g = gn;
    if (sy > 1e-300 * s.squaredNorm()) {
      if (fresh) {
        hinv *= sy / y.squaredNorm();
        fresh = false;
      }
      const double rho = 1.0 / sy;
      const Vector hy = hinv * y;
      hinv += ((sy + y.dot(hy)) * rho * rho) * (s * s.transpose()) - rho * (hy * s.transpose() + s * hy.transpose());
    }
    if (s.lpNorm<Eigen::Infinity>() <= options.step_tol * std::max(1.0, x.lpNorm<Eigen::Infinity>()) &&
        df <= 0.0) {
      break;
    }
  }
  out.x = std::move(x);
  out.f = fx;
  out.grad_norm = g.lpNorm<Eigen::Infinity>();
  out.iterations = it;
  if (out.grad_norm <= options.grad_tol) out.converged = true;
  return out;
}

Vector finite_difference_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
  Vector g(x.size());
  Vector xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(x(i)));
    xp(i) = x(i) + step;
    const double fp = f(xp);
    xp(i) = x(i) - step;
    const double fm = f(xp);
    xp(i) = x(i);
    g(i) = (fp - fm) / (2.0 * step);
  }
  return g;
}

namespace {

struct Evaluated {
  Vector c;
  Matrix jc;
  Vector g;
  Matrix jg;
};

Evaluated evaluate_constraints(const Problem& p, const Vector& x, bool jac) {
  Evaluated e;
  if (p.equalities) {
    e.c = p.equalities(x, jac ? &e.jc : nullptr);
  } else {
    e.c.resize(0);
    e.jc.resize(0, x.size());
  }
  if (p.inequalities) {
    e.g = p.inequalities(x, jac ? &e.jg : nullptr);
  } else {
    e.g.resize(0);
    e.jg.resize(0, x.size());
  }
  return e;
}

double max_abs(const Vector& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

double max_violation(const Vector& g) {
  double v = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) v = std::max(v, -g(i));
  return v;
}

// Active-set matrices: equalities plus inequalities flagged in `active`.
void stack_active(const Evaluated& e, const std::vector<int>& active, Vector& c, Matrix& j) {
  const Eigen::Index n = e.jc.cols() ? e.jc.cols() : e.jg.cols();
  const Eigen::Index m = e.c.size() + static_cast<Eigen::Index>(active.size());
  c.resize(m);
  j.resize(m, n);
  for (Eigen::Index i = 0; i < e.c.size(); ++i) {
    c(i) = e.c(i);
    j.row(i) = e.jc.row(i);
  }
  for (std::size_t k = 0; k < active.size(); ++k) {
    const Eigen::Index r = e.c.size() + static_cast<Eigen::Index>(k);
    c(r) = e.g(active[k]);
    j.row(r) = e.jg.row(active[k]);
  }
}

double kkt_residual(const Vector& grad, const Matrix& j, Vector* y_out) {
  if (j.rows() == 0) {
    if (y_out) y_out->resize(0);
    return max_abs(grad);
  }
  const Vector y = j.transpose().completeOrthogonalDecomposition().solve(grad);
  if (y_out) *y_out = y;
  return max_abs(grad - j.transpose() * y);
}

}  // namespace

AlmResult minimize(const Problem& problem, const Vector& x0, const AlmOptions& options) {
  AlmResult out;
  Vector x = x0;
  Evaluated e = evaluate_constraints(problem, x, false);
  Vector lam = Vector::Zero(e.c.size());
  Vector nu = Vector::Zero(e.g.size());
  double mu = options.penalty;
  double prev_violation = std::numeric_limits<double>::infinity();
  double inner_tol = 1e-3;

  for (int outer = 0; outer < options.max_outer; ++outer) {
    out.outer_iterations = outer + 1;
    const Objective merit = [&](const Vector& z, Vector* grad) {
      Vector gf(z.size());
      double v = problem.objective(z, grad ? &gf : nullptr);
      if (!std::isfinite(v)) return v;
      Evaluated ez = evaluate_constraints(problem, z, grad != nullptr);
      for (Eigen::Index i = 0; i < ez.c.size(); ++i) v += lam(i) * ez.c(i) + 0.5 * mu * ez.c(i) * ez.c(i);
      Vector shifted(ez.g.size());
      for (Eigen::Index i = 0; i < ez.g.size(); ++i) {
        shifted(i) = std::max(0.0, nu(i) - mu * ez.g(i));
        v += (shifted(i) * shifted(i) - nu(i) * nu(i)) / (2.0 * mu);
      }
      if (grad) {
        *grad = gf;
        if (ez.c.size()) *grad += ez.jc.transpose() * (lam + mu * ez.c);
        if (ez.g.size()) *grad -= ez.jg.transpose() * shifted;
      }
      return v;
    };
    BfgsOptions bo;
    bo.max_iterations = options.max_inner;
    bo.grad_tol = inner_tol;
    const BfgsResult inner = bfgs(merit, x, bo);
    out.inner_iterations += inner.iterations;
    x = inner.x;

    e = evaluate_constraints(problem, x, false);
    out.objective_trajectory.push_back(problem.objective(x, nullptr));
    double violation = max_abs(e.c);
    for (Eigen::Index i = 0; i < e.g.size(); ++i) {
      violation = std::max(violation, std::abs(std::min(e.g(i), nu(i) / mu)));
    }
    if (e.c.size()) lam += mu * e.c;
    for (Eigen::Index i = 0; i < e.g.size(); ++i) nu(i) = std::max(0.0, nu(i) - mu * e.g(i));

    // The Newton polish below finishes from here.
    if (violation <= std::max(options.tol_eq, options.handoff_tol) &&
        inner.grad_norm <= std::max(options.tol_kkt, options.handoff_tol)) {
      break;
    }
    if (violation > 0.25 * prev_violation) mu = std::min(mu * options.penalty_growth, options.penalty_max);
    prev_violation = violation;
    inner_tol = std::max(1e-12, std::min(inner_tol * 0.1, 0.1 * violation + 1e-12));
  }

  // Newton polish of the KKT conditions on the active set.
  std::vector<int> active;
  {
    Evaluated ea = evaluate_constraints(problem, x, false);
    for (Eigen::Index i = 0; i < ea.g.size(); ++i) {
      if (ea.g(i) < -options.tol_eq || (nu(i) > 0.0 && ea.g(i) < 1e-6)) active.push_back(static_cast<int>(i));
    }
  }
  auto kkt_state = [&](const Vector& z, Vector& grad, Vector& c, Matrix& j, Vector& y) {
    problem.objective(z, &grad);
    Evaluated ez = evaluate_constraints(problem, z, true);
    stack_active(ez, active, c, j);
    return std::max(kkt_residual(grad, j, &y), max_abs(c));
  };
  Vector grad(x.size());
  Vector c;
  Matrix j;
  Vector y;
  double merit = kkt_state(x, grad, c, j, y);
  const Eigen::Index n = x.size();
  for (int it = 0; it < options.polish_iterations && merit > 1e-14; ++it) {
    const Eigen::Index m = c.size();
    auto lag_grad = [&](const Vector& z) {
      Vector gz(n);
      problem.objective(z, &gz);
      Evaluated ez = evaluate_constraints(problem, z, true);
      Vector cz;
      Matrix jz;
      stack_active(ez, active, cz, jz);
      return Vector(gz - (m ? Vector(jz.transpose() * y) : Vector::Zero(n)));
    };
    Matrix w(n, n);
    Vector zp = x;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(x(k)));
      zp(k) = x(k) + h;
      const Vector gp = lag_grad(zp);
      zp(k) = x(k) - h;
      const Vector gm = lag_grad(zp);
      zp(k) = x(k);
      w.col(k) = (gp - gm) / (2.0 * h);
    }
    w = 0.5 * (w + w.transpose()).eval();
    Matrix kkt = Matrix::Zero(n + m, n + m);
    kkt.topLeftCorner(n, n) = w;
    if (m) {
      kkt.topRightCorner(n, m) = -j.transpose();
      kkt.bottomLeftCorner(m, n) = j;
    }
    Vector rhs(n + m);
    rhs.head(n) = -(grad - (m ? Vector(j.transpose() * y) : Vector::Zero(n)));
    if (m) rhs.tail(m) = -c;
    const Vector step = kkt.completeOrthogonalDecomposition().solve(rhs);
    const Vector xn = x + step.head(n);
    if (!std::isfinite(problem.objective(xn, nullptr))) break;
    Evaluated en = evaluate_constraints(problem, xn, false);
    bool inactive_ok = true;
    for (Eigen::Index i = 0; i < en.g.size(); ++i) {
      if (std::find(active.begin(), active.end(), static_cast<int>(i)) == active.end() &&
          en.g(i) < -options.tol_eq) {
        inactive_ok = false;
      }
    }
    if (!inactive_ok) break;
    Vector gn(n);
    Vector cn;
    Matrix jn;
    Vector yn;
    const double mn = kkt_state(xn, gn, cn, jn, yn);
    if (!(mn < merit)) break;
    x = xn;
    grad = gn;
    c = cn;
    j = jn;
    y = yn;
    merit = mn;
  }

  e = evaluate_constraints(problem, x, false);
  out.x = x;
  out.f = problem.objective(x, nullptr);
  out.max_equality = max_abs(e.c);
  out.max_inequality = max_violation(e.g);
  out.kkt = kkt_residual(grad, j, nullptr);
  out.multipliers_eq = lam;
  out.multipliers_in = nu;
  out.objective_trajectory.push_back(out.f);
  out.converged = out.max_equality <= options.tol_eq && out.max_inequality <= options.tol_eq &&
                  out.kkt <= options.tol_kkt;
  return out;
}

}  // namespace popup::opt
