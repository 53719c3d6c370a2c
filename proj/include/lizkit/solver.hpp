#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "lizkit/fourier.hpp"
#include "lizkit/tolerances.hpp"

namespace lizkit {

/// T-periodic splines with atoms rho_perio,alpha(. - tau), alpha > 1.
struct PeriodicFamily {
  double alpha = 2.0;
  double period = 1.0;
  int order = kDefaultTruncation;
};

/// Corrected fractional-Laplacian kernels in R^d, alpha > d, alpha - d not an integer.
struct FracLapFamily {
  double alpha = 2.5;
  int dim = 1;
};

/// Corrected ridges rho_m(<xi, x> - t) in R^d, optionally with a polynomial of degree m - 1.
struct RidgeFamily {
  int m = 2;
  int dim = 2;
  bool polynomial = false;
};

using Family = std::variant<PeriodicFamily, FracLapFamily, RidgeFamily>;

std::string family_name(const Family& family);
int family_dim(const Family& family);

struct Loss {
  enum class Kind { quadratic, huber };
  Kind kind = Kind::quadratic;
  double delta = 1.0;  ///< Huber threshold

  static Loss quadratic() { return {}; }
  static Loss huber(double delta) { return {Kind::huber, delta}; }

  /// E(y, z) as a function of the residual y - z: r^2/2, or the Huber function.
  double value(double residual) const;
  /// -dE/dz, i.e. r for the quadratic loss and clip(r, -delta, delta) for Huber.
  double influence(double residual) const;
};

struct FitProblem {
  Family family;
  Eigen::MatrixXd x;  ///< M x d data locations, one per row
  Eigen::VectorXd y;  ///< M values
  Loss loss;
  double lambda = 1e-3;
  /// Equality constraints y = f(x), approached by continuation in lambda.
  bool interpolate = false;
};

struct SolverOptions {
  double rel_gap = 1e-6;
  int max_iter = 200;
  /// Atoms closer than this (relative to the domain size, or in radians) are merged.
  double merge_tol = 1e-6;
  double interp_tol = 1e-8;
  int max_continuation = 80;
  /// Joint refinement of atom positions and weights after each weight solve.
  bool sliding = true;
  /// Number of local maxima of the certificate refined per iteration.
  int refine_candidates = 4;

  std::uint64_t seed = 0;
  /// Uniform jitter of the candidate grid, as a fraction of the grid step.
  double grid_jitter = 0.0;

  int periodic_grid = 2048;
  int fraclap_grid_1d = 400;
  int fraclap_grid_2d = 40;
  int ridge_directions = 180;
  int ridge_offsets = 200;
};

/// b0 + sum_k a_k rho_perio,alpha(t - tau_k)
struct SplineModel {
  PeriodicFamily family;
  double offset = 0.0;
  std::vector<Atom1D> atoms;
};

struct PointAtom {
  double weight;
  Eigen::VectorXd location;
};

/// sum_k a_k h(x, x_k) with the corrected kernel h.
struct LizSplineModel {
  FracLapFamily family;
  std::vector<PointAtom> atoms;
};

struct RidgeAtom {
  double weight;
  double offset;              ///< t_k
  Eigen::VectorXd direction;  ///< unit xi_k
};

/// sum_k a_k h_m(x, (t_k, xi_k)) + p(x); p has one coefficient per monomial of
/// multi_indices_up_to(d, m - 1) and is empty unless the family enables it.
struct RidgeModel {
  RidgeFamily family;
  std::vector<RidgeAtom> atoms;
  Eigen::VectorXd poly;
};

using Model = std::variant<SplineModel, LizSplineModel, RidgeModel>;

Family model_family(const Model& model);
std::size_t atom_count(const Model& model);

/// Representation of the model at x (length-d vector; length 1 for the periodic family).
double evaluate_model(const Model& model, const Eigen::VectorXd& x);
Eigen::VectorXd evaluate_points(const Model& model, const Eigen::MatrixXd& points);

/// sum_k |a_k|; the offset and polynomial part do not contribute. Error: DuplicateAtoms.
double mnorm_of_model(const Model& model, const Tolerances& tol = {});

/// Sparsity bound K0 for M data points: M - 1 (periodic), M (fraclap, ridge),
/// M - dim P_{m-1} (ridge with polynomial part).
int atom_bound(const Family& family, int n_data);

/// sum_m E(y_m, f(x_m)) + lambda ||mu||_M
double objective(const FitProblem& problem, const Model& model);

enum class FitStatus { converged, not_converged, infeasible_interpolation };
std::string status_name(FitStatus status);

struct IterationRecord {
  int iter;
  double objective;
  double gap;  ///< (primal - dual) / max(|primal|, 1e-300)
  int n_atoms;
};

struct FitResult {
  Model model;
  FitStatus status = FitStatus::not_converged;
  double lambda = 0.0;          ///< final lambda (smallest continuation step in interpolation mode)
  double objective = 0.0;       ///< at the final lambda
  double lower_bound = 0.0;     ///< dual value certifying the objective
  double max_certificate = 0.0; ///< max |eta| over the candidate grid and refined maxima
  Eigen::VectorXd fitted;       ///< f(x_m)
  Eigen::VectorXd residuals;    ///< y_m - f(x_m)
  std::vector<IterationRecord> trace;
};

/// Exchange method: certificate search on a candidate grid with local
/// refinement, soft-thresholded coordinate descent on the weights (plus an
/// active-set polish for the quadratic loss), joint position refinement,
/// pruning, merging and support reduction to the K0 bound.
FitResult fit(const FitProblem& problem, const SolverOptions& options = {});

/// Largest |eta| with eta(atom) = sum_m psi(r_m) h(x_m, atom) over a candidate
/// grid `refine` times finer than the solver's, with the residual of `model`.
double certificate_sup(const FitProblem& problem, const Model& model, const SolverOptions& options, int refine);

struct SeminormReport {
  double numeric = 0.0;   ///< ||d_t^m K_rad R f|| from the sampled pipeline
  double expected = 0.0;  ///< sum_k |a_k|
  double rel_deviation = 0.0;
};

struct SeminormOptions {
  double mollifier_width = 0.05;
  int n_t = 2048;
  int n_dir = 180;
  double angular_tol = 1e-9;
};

/// Numeric Radon-domain seminorm of a planar ridge model (m = 2, directions on
/// the angular grid): mollified profiles, the ridge identity through R and
/// K_rad, m-fold differencing in t and total variation over the full circle.
SeminormReport verify_seminorm_ridge(const RidgeModel& model, const SeminormOptions& options = {});

struct ModelGrowthSample {
  double norm_x;
  double ratio;  ///< |f(x)| / (||mu|| (1 + ||x||)^{m-1})
};

struct ModelGrowthReport {
  std::vector<ModelGrowthSample> samples;
  double bound_C = 0.0;
  double slope = 0.0;  ///< slope of log max ratio per radius vs log(1 + radius), outer half of the radii
  bool passed = false;
};

/// Far-field growth of a ridge model against ||mu|| C (1 + ||x||)^{m-1} on
/// `n_dirs` directions and the given radii.
ModelGrowthReport ridge_growth_check(const RidgeModel& model, const std::vector<double>& radii, int n_dirs = 64,
                                     double slope_tolerance = 0.02);

}  // namespace lizkit
