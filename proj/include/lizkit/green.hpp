#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <vector>

#include "lizkit/polynomial.hpp"
#include "lizkit/tolerances.hpp"

namespace lizkit {

/// Green's function of the 1-D fractional derivative D^alpha, alpha > 0:
/// t_+^{alpha-1} / Gamma(alpha), or sign(t)/2 * t^n / n! when alpha - 1 = n is an integer.
double rho_1d(double alpha, double t);

/// Truncated power max(0, s)^{m-1} / (m-1)!, the ReLU for m = 2.
template <typename Scalar>
Scalar ridge_profile(int m, Scalar s) {
  if (!(s > Scalar(0))) return Scalar(0);
  Scalar v = Scalar(1);
  for (int k = 1; k < m; ++k) v *= s / Scalar(k);
  return v;
}

/// Smooth cutoff: 0 on |t| <= 1, 1 on |t| >= 2, quintic smoothstep in between
/// (C^2 at both seams).
struct Cutoff {
  template <typename Scalar>
  Scalar operator()(Scalar t) const {
    const Scalar u = std::abs(t) - Scalar(1);
    if (u <= Scalar(0)) return Scalar(0);
    if (u >= Scalar(1)) return Scalar(1);
    return u * u * u * (u * (u * Scalar(6) - Scalar(15)) + Scalar(10));
  }
};

/// Impulse response k_{alpha,d} of the fractional integrator (-Delta)^{-alpha/2}
/// together with the closed-form derivatives of ||x||^{alpha-d}.
///
/// Derivatives use d^k ||x||^b = P_k(x) ||x||^{b - 2|k|} with polynomials
/// generated by P_{k+e_i} = ||x||^2 d_i P_k + (b - 2|k|) x_i P_k, P_0 = 1.
class FracLaplaceKernel {
 public:
  enum class Case { power, log, distributional };

  /// Tables of P_k are built for |k| <= max(ceil(alpha - d), max_derivative_order).
  FracLaplaceKernel(double alpha, int dim, int max_derivative_order = 2);

  double alpha() const { return alpha_; }
  int dim() const { return dim_; }
  Case kind() const { return case_; }
  /// Exponent alpha - d.
  double exponent() const { return alpha_ - dim_; }

  /// Gamma((d - alpha)/2) / (2^alpha pi^{d/2} Gamma(alpha/2)); NaN on the log case.
  double A() const { return a_const_; }
  /// (-1)^{1+n} / (2^{2n+d-1} pi^{d/2} Gamma(n + d/2) n!) with alpha - d = 2n; NaN otherwise.
  double B() const { return b_const_; }

  /// alpha > d and alpha - d not an integer: the regime where the polynomial
  /// correction of the kernel is defined.
  bool corrected_regime() const;
  /// ceil(alpha - d - 1), total order of the correcting Taylor polynomial.
  int taylor_order() const;
  int max_derivative_order() const { return max_order_; }

  /// Kernel value k_{alpha,d}(x).
  double operator()(const Eigen::VectorXd& x) const;

  /// d^k ||x||^{alpha-d} from the polynomial tables; x != 0.
  double power_derivative(const MultiIndex& k, const Eigen::VectorXd& x) const;
  /// d^k k_{alpha,d}(x) on the power case, A * power_derivative(k, x).
  double derivative(const MultiIndex& k, const Eigen::VectorXd& x) const;
  const Polynomial& derivative_polynomial(const MultiIndex& k) const;

  /// Taylor polynomial of x -> k_{alpha,d}(x - y) about 0 of total order taylor_order().
  double taylor_polynomial(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

 private:
  double alpha_;
  int dim_;
  Case case_;
  double a_const_;
  double b_const_;
  int log_n_ = -1;
  int max_order_;
  std::map<MultiIndex, Polynomial> tables_;
  std::vector<MultiIndex> taylor_indices_;
};

/// Pointwise k_{alpha,d}(x). Errors: DistributionalCase, OriginSingularity.
double k_frac_laplace(const FracLaplaceKernel& kern, const Eigen::VectorXd& x);

/// h(x, y) = k(x - y) - chi(||y||) T{k(. - y)}(x); requires the corrected regime.
double corrected_kernel_frac(const FracLaplaceKernel& kern, const Cutoff& chi, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& y);

/// Weight max(0, min(-t, 1)) of the ridge correction polynomial.
inline double ridge_correction_weight(double t) { return std::max(0.0, std::min(-t, 1.0)); }

/// h(x, (t, xi)) = rho_m(<x, xi> - t) - w(t) (<x, xi> - t)^{m-1}/(m-1)!; xi must be unit.
double corrected_ridge(int m, const Eigen::VectorXd& x, double t, const Eigen::VectorXd& xi,
                       const Tolerances& tol = {});

struct GrowthSample {
  double norm_x;
  double ratio;  ///< |d^k k(x)| / ||x||^{alpha - d - |k|}
};

struct GrowthReport {
  MultiIndex k;
  std::vector<GrowthSample> samples;
  double bound_C = 0.0;  ///< max ratio over the samples
  double slope = 0.0;    ///< least-squares slope of log(max ratio per radius) vs log radius
  bool passed = false;
};

/// Checks |d^k k(x)| <= C ||x||^{alpha-d-|k|} on the samples: fits C as the
/// largest ratio and passes when the ratio shows no power-law trend in ||x||.
GrowthReport verify_growth_bound(const FracLaplaceKernel& kern, const MultiIndex& k,
                                 const std::vector<Eigen::VectorXd>& samples, double slope_tolerance = 0.02);

}  // namespace lizkit
