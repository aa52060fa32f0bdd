#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace popup::opt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Value and (optional) gradient. Return +inf outside the domain; the line
/// search backs off.
using Objective = std::function<double(const Vector& x, Vector* grad)>;

/// Constraint values and (optional) Jacobian, one row per constraint.
using Constraints = std::function<Vector(const Vector& x, Matrix* jac)>;

struct BfgsOptions {
  int max_iterations = 500;
  double grad_tol = 1e-10;
  double step_tol = 1e-16;
};

struct BfgsResult {
  Vector x;
  double f = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Quasi-Newton minimizer with Armijo backtracking.
BfgsResult bfgs(const Objective& f, Vector x0, const BfgsOptions& options = {});

struct Problem {
  int n = 0;
  Objective objective;
  Constraints equalities;    // c(x) = 0
  Constraints inequalities;  // g(x) >= 0
};

struct AlmOptions {
  double tol_eq = 1e-8;
  double tol_kkt = 1e-6;
  int max_outer = 60;
  int max_inner = 400;
  double penalty = 10.0;
  double penalty_growth = 10.0;
  double penalty_max = 1e12;
  int polish_iterations = 20;
  /// Outer loop hands over to the KKT polish once violation and inner
  /// gradient are both below this.
  double handoff_tol = 1e-7;
};

struct AlmResult {
  Vector x;
  double f = 0.0;
  double max_equality = 0.0;    // max |c_i|
  double max_inequality = 0.0;  // max violation of g_i >= 0
  double kkt = 0.0;             // stationarity of the Lagrangian on the active set
  int outer_iterations = 0;
  int inner_iterations = 0;
  bool converged = false;
  Vector multipliers_eq;
  Vector multipliers_in;
  std::vector<double> objective_trajectory;
};

/// Powell-Hestenes-Rockafellar augmented Lagrangian with a BFGS inner solve,
/// followed by Newton iterations on the KKT system of the active set.
AlmResult minimize(const Problem& problem, const Vector& x0, const AlmOptions& options = {});

/// Central finite-difference gradient, step h (relative to max(1, |x_i|)).
Vector finite_difference_gradient(const std::function<double(const Vector&)>& f, const Vector& x,
                                  double h = 1e-6);

}  // namespace popup::opt
