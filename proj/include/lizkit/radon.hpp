#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <string>

namespace lizkit {

/// Point values of a function on a centered cube with odd side count; the
/// middle sample sits at the origin. Planar fields are stored as an n x n
/// matrix with values(i, j) = f((i - c) h, (j - c) h), c = (n - 1)/2.
struct SampledField {
  int dim = 2;
  double spacing = 1.0;
  Eigen::MatrixXd values;

  int size() const { return static_cast<int>(values.rows()); }
  double coord(int i) const { return (i - (size() - 1) / 2.0) * spacing; }
  double half_width() const { return (size() - 1) / 2.0 * spacing; }

  static SampledField zeros(int n, double spacing);
  static SampledField sample(int n, double spacing, const std::function<double(double, double)>& f);
};

enum class Parity { even, odd };

/// Radon-domain samples g(t_i, xi_k) on a uniform t grid and directions
/// xi_k = (cos theta_k, sin theta_k), theta_k = k pi / n_dir. The opposite half
/// of the circle is implied by the parity: g(-t, -xi) = +/- g(t, xi).
struct SinogramGrid {
  double t_min = -1.0;
  double t_max = 1.0;
  Eigen::MatrixXd values;  ///< n_t x n_dir
  Parity parity = Parity::even;

  static SinogramGrid layout(int n_t, double t_min, double t_max, int n_dir);

  int n_t() const { return static_cast<int>(values.rows()); }
  int n_dir() const { return static_cast<int>(values.cols()); }
  double dt() const { return (t_max - t_min) / (n_t() - 1); }
  double t(int i) const { return t_min + i * dt(); }
  double angle(int k) const;
  Eigen::Vector2d direction(int k) const;
  /// Angular step pi / n_dir.
  double dtheta() const;
  double parity_sign() const { return parity == Parity::even ? 1.0 : -1.0; }
};

struct RadonOptions {
  /// Points per axis of the Lagrange interpolation stencil (2 = bilinear).
  int interp_points = 8;
  /// Reject fields whose boundary values exceed this fraction of the maximum.
  double boundary_tol = 1e-8;
};

/// Planar Radon transform by trapezoidal line integrals through the
/// interpolated field. Errors: UnsupportedDimension, BoundaryMass.
SinogramGrid radon(const SampledField& f, const SinogramGrid& layout, const RadonOptions& opt = {});

/// Backprojection R*{g}(x) = int_{S^1} g(<xi, x>, xi) dxi over the full circle,
/// using the sinogram parity for the implied half; Lagrange interpolation in t.
SampledField backproject(const SinogramGrid& g, int n, double spacing, int interp_points = 8);

/// Column filter with frequency response c_d |w|^{d-1}, c_d = 1/(2 (2 pi)^{d-1}).
/// The response is a pure multiplier, so it does not depend on the Fourier
/// normalization. Columns are zero-padded by `pad_factor` before the FFT.
SinogramGrid filter_Krad(const SinogramGrid& g, int dim = 2, int pad_factor = 4);

/// Inverse of filter_Krad, i.e. convolution with q_d, realized by dividing the
/// column spectra by c_d |w|^{d-1}. Bins with |w| < omega_min are zeroed.
SinogramGrid deconvolve_Krad(const SinogramGrid& g, double omega_min, int dim = 2, int pad_factor = 4);

/// m-fold central differencing along t; flips the parity when m is odd.
SinogramGrid differentiate_t(const SinogramGrid& g, int m);

/// <g1, g2>_Rad = int_{S^1} int g1 g2 dt dxi over the full circle.
double radon_pairing(const SinogramGrid& g1, const SinogramGrid& g2);
/// int_{R^2} f1 f2 dx by the rectangle rule.
double field_pairing(const SampledField& f1, const SampledField& f2);
/// Total variation int_{S^1} int |g| dt dxi over the full circle.
double radon_total_variation(const SinogramGrid& g);

/// Planar Fourier transform with the (2 pi)^{-2} prefactor,
/// (2 pi)^{-2} int f(x) exp(-j <w, x>) dx, by direct quadrature.
std::complex<double> fourier_transform_2d(const SampledField& f, const Eigen::Vector2d& omega);

struct SliceReport {
  Eigen::Vector2d direction;
  double max_abs_error = 0.0;  ///< max |lhs - rhs| over the central half of the band
  double max_rel_error = 0.0;  ///< max_abs_error / max_magnitude
  double max_magnitude = 0.0;  ///< max |rhs| on the same band
  int frequencies = 0;
};

/// Fourier slice check along xi: the 1-D transform of the Radon column,
/// (2 pi)^{-1} int Rf(t, xi) exp(-j w t) dt, must equal 2 pi times the planar
/// transform sampled at w xi. Frequencies are the FFT bins of the column.
SliceReport slice_check(const SampledField& f, const Eigen::Vector2d& xi, int n_t, double t_half_width,
                        const RadonOptions& opt = {});

/// Profile placed on a concentrated sinogram column.
struct RidgeProfile {
  enum class Kind { dirac, function };
  Kind kind = Kind::dirac;
  std::function<double(double)> r;  ///< profile r(t), used for Kind::function

  static RidgeProfile dirac() { return {}; }
  static RidgeProfile function(std::function<double(double)> r) { return {Kind::function, std::move(r)}; }
  /// Truncated power rho_m(t).
  static RidgeProfile truncated_power(int m);
};

/// Even-symmetrized concentrated sinogram P_even{r(t - t0) delta(. - xi0)} on the
/// direction grid: the column nearest xi0 (or -xi0, with r reflected) carries
/// r / (2 dtheta); every other column is zero. A Dirac profile is split
/// linearly between the two nearest t samples. Error: DirectionNotOnGrid.
SinogramGrid radon_of_ridge(const RidgeProfile& profile, double t0, const Eigen::VectorXd& xi0,
                            const SinogramGrid& layout, double angular_tol = 1e-9);

/// Column index whose direction is +xi (sign +1) or -xi (sign -1) within the tolerance, or -1.
int find_direction_column(const SinogramGrid& layout, const Eigen::Vector2d& xi, double angular_tol, int& sign);

/// Flat little-endian float64 layout: header n_t, n_dir (as uint64), t_min,
/// t_max, then values column by column; plus a JSON sidecar at path + ".json".
void write_sinogram(const std::string& path, const SinogramGrid& g);
SinogramGrid read_sinogram(const std::string& path);

}  // namespace lizkit
