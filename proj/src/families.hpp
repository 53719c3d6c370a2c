#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "lizkit/green.hpp"
#include "lizkit/solver.hpp"

namespace lizkit::detail {

/// Shared kernel object for (alpha, d), built once per thread.
const FracLaplaceKernel& cached_frac_kernel(double alpha, int dim);

/// Parametrized atom dictionary of one model family, bound to a data set.
/// Atom parameters are flat vectors; only the first free_params() entries are
/// refined continuously.
class Dictionary {
 public:
  virtual ~Dictionary() = default;

  virtual int param_size() const = 0;
  virtual int free_params() const { return param_size(); }
  virtual double kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& p) const = 0;
  virtual void normalize(Eigen::VectorXd& /*p*/) const {}
  /// Separation used for merging, relative to the domain size.
  virtual double distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) const = 0;
  virtual std::vector<Eigen::VectorXd> candidates(int refine) const = 0;
  /// Grid adjacency of candidates(refine), index for index.
  virtual std::vector<std::vector<int>> neighbours(int refine) const = 0;
  /// Grid step per free coordinate at refinement 1.
  virtual Eigen::VectorXd grid_step() const = 0;
  /// Separation of two grid neighbours in the distance() metric.
  virtual double grid_radius() const = 0;
  /// Unpenalized columns evaluated on the data (M x q).
  virtual Eigen::MatrixXd null_space() const = 0;

  virtual Model make_model(const std::vector<double>& w, const std::vector<Eigen::VectorXd>& p,
                           const Eigen::VectorXd& c) const = 0;
  virtual void split_model(const Model& model, std::vector<double>& w, std::vector<Eigen::VectorXd>& p,
                           Eigen::VectorXd& c) const = 0;

  using Score = std::function<double(const Eigen::VectorXd&)>;

  /// Local maximization of score around p within about one grid step
  /// (cyclic golden-section search over the free coordinates by default).
  virtual void refine(Eigen::VectorXd& p, const Score& score) const;

  /// Kink constraint p lies on (-1 for none). Anchored atoms slide along the
  /// kink: only sliding_coords move and snap() restores the constraint.
  virtual int anchor(const Eigen::VectorXd& /*p*/) const { return -1; }
  virtual std::vector<int> sliding_coords(int anchor) const;
  virtual void snap(Eigen::VectorXd& p, int /*anchor*/) const { normalize(p); }

  const Eigen::MatrixXd& data() const { return x_; }

  /// Kernel values on every data point.
  Eigen::VectorXd column(const Eigen::VectorXd& p) const;

 protected:
  Dictionary(Eigen::MatrixXd x, const SolverOptions& opt) : x_(std::move(x)), opt_(opt) {}
  /// Deterministic jitter in [-0.5, 0.5) grid steps for the i-th grid axis value.
  std::vector<double> jitter(int n) const;

  Eigen::MatrixXd x_;
  SolverOptions opt_;
};

std::unique_ptr<Dictionary> make_dictionary(const Family& family, const Eigen::MatrixXd& x, const SolverOptions& opt);

/// Golden-section maximization of f on [a, b]; returns the best abscissa.
double golden_max(const std::function<double(double)>& f, double a, double b, int iterations, double& best_value);

}  // namespace lizkit::detail
