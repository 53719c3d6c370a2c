#pragma once

#include <Eigen/Dense>

namespace lizkit::testing {

struct LassoResult {
  Eigen::VectorXd weights;
  Eigen::VectorXd null_coeffs;
  double objective = 0.0;
  int sweeps = 0;
};

/// Fixed-dictionary solve of
///   min_{w, c} 1/2 ||y - A w - N c||^2 + lambda ||w||_1
/// by cyclic coordinate descent with soft thresholding. The unpenalized
/// columns N are eliminated by projecting onto their orthogonal complement.
LassoResult grid_lasso(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double lambda,
                       const Eigen::MatrixXd& null_space = Eigen::MatrixXd(), double tol = 1e-13,
                       int max_sweeps = 20000);

/// Columns rho_perio(x_m - tau_j) for tau_j = j T / n.
Eigen::MatrixXd periodic_dictionary(const Eigen::VectorXd& x, double alpha, double period, int order, int n);

/// Columns h_m(x_m, (t, xi)) with n_angles directions over the full circle and
/// n_offsets offsets at cell centres of [t_lo, t_hi].
Eigen::MatrixXd ridge_dictionary(const Eigen::MatrixXd& x, int m, int n_angles, int n_offsets, double t_lo,
                                 double t_hi);

}  // namespace lizkit::testing
