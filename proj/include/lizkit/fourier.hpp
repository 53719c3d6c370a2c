#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

#include "lizkit/tolerances.hpp"

namespace lizkit {

/// Truncated Fourier series of a real T-periodic signal,
///   s(t) = sum_{n=-N}^{N} c[n] exp(j n w0 t),  w0 = 2 pi / T.
/// Coefficients are stored at index n + N and must be Hermitian.
class FourierSeries {
 public:
  FourierSeries(double period, Eigen::VectorXcd coeffs, const Tolerances& tol = {});

  static FourierSeries zero(double period, int order);

  /// Coefficients of f by the trapezoidal rule on `samples` equispaced points
  /// (samples > 2 * order). Exact for trigonometric polynomials of degree < samples - order.
  static FourierSeries from_function(double period, int order, const std::function<double(double)>& f,
                                     int samples);

  double period() const { return period_; }
  int order() const { return static_cast<int>(coeffs_.size() / 2); }
  double omega0() const;

  std::complex<double> operator[](int n) const { return coeffs_[n + order()]; }
  const Eigen::VectorXcd& coeffs() const { return coeffs_; }

  double evaluate(double t) const;
  Eigen::VectorXd evaluate(const Eigen::VectorXd& t) const;

  /// Average over one period, c[0].
  double mean() const { return coeffs_[order()].real(); }

 private:
  double period_;
  Eigen::VectorXcd coeffs_;
};

/// (j n w0)^alpha on the principal branch, |n w0|^alpha exp(j alpha pi/2 sign(n)); n != 0.
std::complex<double> frac_symbol(int n, double omega0, double alpha);

/// Periodic fractional derivative (alpha > 0) or integral (alpha < 0).
/// The mean coefficient is kept for alpha == 0 and dropped otherwise; for
/// alpha < 0 a non-zero mean is refused with NonZeroMeanForIntegral.
FourierSeries frac_derivative(const FourierSeries& s, double alpha, const Tolerances& tol = {});

/// Removes the mean: the projector onto mean-zero signals.
FourierSeries project_mean_zero(const FourierSeries& s);

/// Periodic Green's function of D^alpha, truncated at |n| <= order:
///   rho(t) = sum_{0<|n|<=N} (j n w0)^{-alpha} exp(j n w0 t)
///          = 2 sum_{n=1}^{N} (n w0)^{-alpha} cos(n w0 t - alpha pi/2).
/// Requires alpha > 1; the truncation error is O(N^{1-alpha}).
double green_periodic(double alpha, double t, double period, int order = kDefaultTruncation);

/// Pairing of the mean-removed Dirac delta_0(. - t0) with phi, evaluated in
/// coefficient form as sum_{n != 0} phi[n] exp(j n w0 t0).
double lizorkin_dirac_pairing(double t0, const FourierSeries& phi);

struct Atom1D {
  double weight;
  double location;
};

/// Finite weighted sum of Dirac masses on [0, T) with pairwise distinct locations.
class AtomicMeasure1D {
 public:
  AtomicMeasure1D() = default;
  explicit AtomicMeasure1D(std::vector<Atom1D> atoms, double period = 1.0);

  const std::vector<Atom1D>& atoms() const { return atoms_; }
  double period() const { return period_; }
  bool empty() const { return atoms_.empty(); }
  std::size_t size() const { return atoms_.size(); }

 private:
  std::vector<Atom1D> atoms_;
  double period_ = 1.0;
};

/// Total-variation norm sum_k |a_k|; DuplicateAtoms when two locations coincide.
double mnorm_atomic(const AtomicMeasure1D& mu, const Tolerances& tol = {});

/// Outcome of pairing delta_0(. - t0) with the bump test function.
struct DiracSaturation {
  double pairing;   ///< <delta_0(. - t0), phi>
  double sup_norm;  ///< max |phi| on the evaluation grid
  double ratio;     ///< pairing / sup_norm, a lower bound on ||delta_0||
};

/// Compact bump with phi0(0) = 1, zero integral, support [-1, 1] and values in [-1, 1].
double mean_free_bump(double u);

/// Builds the periodized bump sum_n phi0((t + nT - t0)/eps), truncates it to a
/// trigonometric polynomial of the given order, removes its mean, and reports
/// how close its pairing with delta_0(. - t0) gets to the norm bound 1.
DiracSaturation projected_dirac_saturation(double t0, double period, double eps, int order = kDefaultTruncation,
                                           int grid = 8192);

}  // namespace lizkit
