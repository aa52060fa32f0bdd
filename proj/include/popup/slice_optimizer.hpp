#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "popup/augmented_lagrangian.hpp"
#include "popup/target_surfaces.hpp"
#include "popup/unit_kinematics.hpp"

namespace popup {

struct SolverConfig {
  double tol_eq = 1e-8;
  double tol_kkt = 1e-6;
  int max_outer = 60;
  int max_inner = 400;
  double penalty = 10.0;
  double penalty_growth = 10.0;
  /// Smallest admissible cut length relative to the slice length.
  double min_length = 1e-6;

  /// Throws InvalidConfig on non-positive tolerances or budgets.
  void validate() const;
};

struct ConstraintResiduals {
  double isometry = 0.0;    // max |sum l - L|
  double on_curve = 0.0;    // max distance of interior vertices from the curve
  double positivity = 0.0;  // max violation of l >= min_length
  double ordering = 0.0;    // max decrease of deployed x along the chain
  double admissible = 0.0;  // max excess of |r| over sqrt(2) L

  double max() const;
};

/// Optimized chain of one slice. Cells and vertices are in physical units
/// (chain length `length`); `loss` is the normalized value with L = 1.
struct SliceDesign {
  int slice = 0;
  double y = 0.0;
  double width = 1.0;
  double length = 1.0;
  std::vector<UnitCell> cells;
  std::vector<FoldVertex> vertices;  // at psi = pi/2
  double loss = 0.0;
  ConstraintResiduals residuals;
  double kkt = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
  bool converged = true;
  std::vector<double> loss_trajectory;
};

/// Smoothness plus uniformity loss: sum of squared first differences of lx
/// and lz plus sum of (l - delta)^2.
double loss_eval(std::span<const double> lx, std::span<const double> lz, double delta);
double loss_eval(const SliceDesign& design, double delta);

/// Same loss with its gradient over the stacked vector [lx, lz].
double loss_with_gradient(const opt::Vector& p, double delta, opt::Vector* grad);

/// Equality constraints [isometry (2), on-curve (N - 1)] of the normalized
/// problem with L = 1, with Jacobian.
opt::Vector slice_equalities(const opt::Vector& p, const SliceCurve& unit_curve, opt::Matrix* jac);

/// Inequalities [positivity (2N), ordering (N - 1), admissible (N)] >= 0.
opt::Vector slice_inequalities(const opt::Vector& p, double min_length, opt::Matrix* jac);

/// Solves the constrained minimization for one slice. Throws Infeasible when
/// the constraints cannot be met and MaxIterations when the solver stops
/// short of tolerance (the message carries the best residuals).
SliceDesign optimize_slice(const SliceCurve& curve, int n, const SolverConfig& config = {});

/// Same as optimize_slice but returns non-converged designs flagged instead of
/// throwing MaxIterations.
SliceDesign optimize_slice_flagged(const SliceCurve& curve, int n, const SolverConfig& config = {});

/// Residuals of a design against its curve, in physical units.
ConstraintResiduals design_residuals(const SliceDesign& design, const SliceCurve& curve,
                                     double min_length = 0.0);

/// Optimizes every slice, in parallel across slices.
std::vector<SliceDesign> optimize_slices(std::span<const SliceCurve> curves, int n,
                                         const SolverConfig& config = {});

struct AzimuthalError {
  std::vector<double> raw;         // per-unit squared angle error
  std::vector<double> normalized;  // raw / mean(raw); all ones when mean is 0
  bool flat = false;
};

/// Per-unit angular error of each unit's fold vertex (the staircase corner
/// at X_i along the floor and L - Z_{i-1} on the wall) measured from the
/// chain start, against the uniform reference (i - 1/2) pi / (2N).
AzimuthalError azimuthal_error(const SliceDesign& design);

struct ConvergencePoint {
  int n = 0;
  double delta = 0.0;
  double loss = 0.0;
};

std::vector<ConvergencePoint> convergence_study(const SliceCurve& curve, std::span<const int> n_list,
                                                const SolverConfig& config = {});

/// Line-oriented per-slice diagnostic report.
void write_report(std::ostream& os, std::span<const SliceDesign> designs);

}  // namespace popup
