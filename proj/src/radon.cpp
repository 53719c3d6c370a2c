#include "lizkit/radon.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <unsupported/Eigen/FFT>
#include <vector>

#include "json.hpp"
#include "lizkit/errors.hpp"

namespace lizkit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxStencil = 16;

/// Lagrange weights for evaluating at fractional index p from `points` nodes
/// starting at `start`.
struct Stencil {
  int start = 0;
  int points = 0;
  std::array<double, kMaxStencil> w{};
};

Stencil lagrange_stencil(double p, int points) {
  Stencil s;
  s.points = points;
  s.start = static_cast<int>(std::floor(p)) - (points / 2 - 1);
  for (int j = 0; j < points; ++j) {
    double w = 1.0;
    for (int i = 0; i < points; ++i) {
      if (i == j) continue;
      w *= (p - (s.start + i)) / static_cast<double>(j - i);
    }
    s.w[j] = w;
  }
  return s;
}

void check_stencil(int points) {
  if (points < 2 || points > kMaxStencil || points % 2 != 0)
    throw Error(errc::kInvalidArgument, "interpolation stencil must be even and between 2 and 16 points");
}

double interpolate_field(const SampledField& f, double x, double y, int points) {
  const int n = f.size();
  const double c = (n - 1) / 2.0;
  const double px = x / f.spacing + c;
  const double py = y / f.spacing + c;
  if (px < -1.0 || py < -1.0 || px > n || py > n) return 0.0;
  const Stencil sx = lagrange_stencil(px, points);
  const Stencil sy = lagrange_stencil(py, points);
  double acc = 0.0;
  for (int a = 0; a < points; ++a) {
    const int i = sx.start + a;
    if (i < 0 || i >= n) continue;
    double row = 0.0;
    for (int b = 0; b < points; ++b) {
      const int j = sy.start + b;
      if (j < 0 || j >= n) continue;
      row += sy.w[b] * f.values(i, j);
    }
    acc += sx.w[a] * row;
  }
  return acc;
}

template <typename Column>
double interpolate_column(const Column& col, double t_min, double dt, double t, int points) {
  const int n = static_cast<int>(col.size());
  const double p = (t - t_min) / dt;
  if (p < -1.0 || p > n) return 0.0;
  const Stencil s = lagrange_stencil(p, points);
  double acc = 0.0;
  for (int a = 0; a < points; ++a) {
    const int i = s.start + a;
    if (i >= 0 && i < n) acc += s.w[a] * col[i];
  }
  return acc;
}

void check_planar(const SampledField& f) {
  if (f.dim != 2) throw Error(errc::kUnsupportedDimension, "Radon quadrature is implemented for planar fields only");
  if (f.values.rows() != f.values.cols() || f.size() % 2 == 0)
    throw Error(errc::kInvalidArgument, "SampledField must be square with an odd side count");
}

void check_boundary(const SampledField& f, double tol) {
  const double peak = f.values.cwiseAbs().maxCoeff();
  if (peak == 0.0) return;
  const int n = f.size();
  double edge = 0.0;
  edge = std::max(edge, f.values.row(0).cwiseAbs().maxCoeff());
  edge = std::max(edge, f.values.row(n - 1).cwiseAbs().maxCoeff());
  edge = std::max(edge, f.values.col(0).cwiseAbs().maxCoeff());
  edge = std::max(edge, f.values.col(n - 1).cwiseAbs().maxCoeff());
  if (edge > tol * peak) throw Error(errc::kBoundaryMass, "field does not decay at the cube boundary");
}

/// Line integrals int f(t xi + u xi_perp) du for t = t_min + i dt.
Eigen::VectorXd radon_column(const SampledField& f, const Eigen::Vector2d& xi, double t_min, double dt, int n_t,
                             int points) {
  const Eigen::Vector2d perp(-xi.y(), xi.x());
  const double du = f.spacing;
  const int half_steps = static_cast<int>(std::ceil(f.half_width() * std::sqrt(2.0) / du)) + points;
  Eigen::VectorXd col(n_t);
  for (int i = 0; i < n_t; ++i) {
    const double t = t_min + i * dt;
    double acc = 0.0;
    for (int l = -half_steps; l <= half_steps; ++l) {
      const Eigen::Vector2d x = t * xi + (l * du) * perp;
      acc += interpolate_field(f, x.x(), x.y(), points);
    }
    col[i] = acc * du;
  }
  return col;
}

/// Applies a real, even spectral multiplier to every column.
SinogramGrid apply_multiplier(const SinogramGrid& g, int pad_factor, const std::function<double(double)>& response) {
  if (pad_factor < 1) throw Error(errc::kInvalidArgument, "pad factor must be >= 1");
  const int n = g.n_t();
  const int L = static_cast<int>(std::bit_ceil(static_cast<unsigned>(n * pad_factor)));
  const double dt = g.dt();
  std::vector<double> multiplier(L);
  for (int k = 0; k < L; ++k) {
    const int kk = k <= L / 2 ? k : k - L;
    multiplier[k] = response(2.0 * kPi * kk / (L * dt));
  }
  Eigen::FFT<double> fft;
  SinogramGrid out = g;
  std::vector<double> in(L), back(L);
  std::vector<std::complex<double>> spec;
  for (int c = 0; c < g.n_dir(); ++c) {
    std::fill(in.begin(), in.end(), 0.0);
    for (int i = 0; i < n; ++i) in[i] = g.values(i, c);
    fft.fwd(spec, in);
    for (int k = 0; k < L; ++k) spec[k] *= multiplier[k];
    fft.inv(back, spec);
    for (int i = 0; i < n; ++i) out.values(i, c) = back[i];
  }
  return out;
}

double filter_constant(int dim) { return 1.0 / (2.0 * std::pow(2.0 * kPi, dim - 1)); }

}  // namespace

SampledField SampledField::zeros(int n, double spacing) {
  if (n < 3 || n % 2 == 0) throw Error(errc::kInvalidArgument, "SampledField: side count must be odd and >= 3");
  SampledField f;
  f.spacing = spacing;
  f.values = Eigen::MatrixXd::Zero(n, n);
  return f;
}

SampledField SampledField::sample(int n, double spacing, const std::function<double(double, double)>& fn) {
  SampledField f = zeros(n, spacing);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f.values(i, j) = fn(f.coord(i), f.coord(j));
  return f;
}

SinogramGrid SinogramGrid::layout(int n_t, double t_min, double t_max, int n_dir) {
  if (n_t < 2 || n_dir < 1 || !(t_max > t_min)) throw Error(errc::kInvalidArgument, "SinogramGrid: invalid layout");
  SinogramGrid g;
  g.t_min = t_min;
  g.t_max = t_max;
  g.values = Eigen::MatrixXd::Zero(n_t, n_dir);
  return g;
}

double SinogramGrid::dtheta() const { return kPi / n_dir(); }

double SinogramGrid::angle(int k) const { return k * dtheta(); }

Eigen::Vector2d SinogramGrid::direction(int k) const { return {std::cos(angle(k)), std::sin(angle(k))}; }

SinogramGrid radon(const SampledField& f, const SinogramGrid& layout, const RadonOptions& opt) {
  check_planar(f);
  check_stencil(opt.interp_points);
  check_boundary(f, opt.boundary_tol);
  SinogramGrid g = layout;
  g.parity = Parity::even;
  for (int k = 0; k < g.n_dir(); ++k)
    g.values.col(k) = radon_column(f, g.direction(k), g.t_min, g.dt(), g.n_t(), opt.interp_points);
  return g;
}

SampledField backproject(const SinogramGrid& g, int n, double spacing, int interp_points) {
  check_stencil(interp_points);
  SampledField f = SampledField::zeros(n, spacing);
  const double weight = (1.0 + g.parity_sign()) * g.dtheta();
  if (weight == 0.0) return f;
  for (int k = 0; k < g.n_dir(); ++k) {
    const Eigen::Vector2d xi = g.direction(k);
    const auto col = g.values.col(k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double t = xi.x() * f.coord(i) + xi.y() * f.coord(j);
        f.values(i, j) += interpolate_column(col, g.t_min, g.dt(), t, interp_points);
      }
  }
  f.values *= weight;
  return f;
}

SinogramGrid filter_Krad(const SinogramGrid& g, int dim, int pad_factor) {
  const double c = filter_constant(dim);
  return apply_multiplier(g, pad_factor, [c, dim](double w) { return c * std::pow(std::abs(w), dim - 1); });
}

SinogramGrid deconvolve_Krad(const SinogramGrid& g, double omega_min, int dim, int pad_factor) {
  const double c = filter_constant(dim);
  return apply_multiplier(g, pad_factor, [c, dim, omega_min](double w) {
    const double a = std::abs(w);
    if (a < omega_min || a == 0.0) return 0.0;
    return 1.0 / (c * std::pow(a, dim - 1));
  });
}

SinogramGrid differentiate_t(const SinogramGrid& g, int m) {
  if (m < 0) throw Error(errc::kInvalidArgument, "differentiate_t: order must be >= 0");
  SinogramGrid out = g;
  const int n = g.n_t();
  const double dt = g.dt();
  int remaining = m;
  while (remaining > 0) {
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(n, g.n_dir());
    if (remaining >= 2) {
      for (int i = 1; i + 1 < n; ++i)
        next.row(i) = (out.values.row(i + 1) - 2.0 * out.values.row(i) + out.values.row(i - 1)) / (dt * dt);
      remaining -= 2;
    } else {
      for (int i = 1; i + 1 < n; ++i) next.row(i) = (out.values.row(i + 1) - out.values.row(i - 1)) / (2.0 * dt);
      out.parity = out.parity == Parity::even ? Parity::odd : Parity::even;
      remaining -= 1;
    }
    out.values = std::move(next);
  }
  return out;
}

double radon_pairing(const SinogramGrid& g1, const SinogramGrid& g2) {
  if (g1.n_t() != g2.n_t() || g1.n_dir() != g2.n_dir())
    throw Error(errc::kInvalidArgument, "radon_pairing: sinogram layouts differ");
  const double halves = 1.0 + g1.parity_sign() * g2.parity_sign();
  return halves * g1.dtheta() * g1.dt() * g1.values.cwiseProduct(g2.values).sum();
}

double field_pairing(const SampledField& f1, const SampledField& f2) {
  if (f1.size() != f2.size()) throw Error(errc::kInvalidArgument, "field_pairing: field sizes differ");
  return f1.spacing * f1.spacing * f1.values.cwiseProduct(f2.values).sum();
}

double radon_total_variation(const SinogramGrid& g) { return 2.0 * g.dtheta() * g.dt() * g.values.cwiseAbs().sum(); }

std::complex<double> fourier_transform_2d(const SampledField& f, const Eigen::Vector2d& omega) {
  check_planar(f);
  const int n = f.size();
  Eigen::VectorXcd u(n), v(n);
  for (int i = 0; i < n; ++i) {
    u[i] = std::polar(1.0, -omega.x() * f.coord(i));
    v[i] = std::polar(1.0, -omega.y() * f.coord(i));
  }
  const std::complex<double> sum = u.transpose() * f.values.cast<std::complex<double>>() * v;
  return sum * (f.spacing * f.spacing) / (4.0 * kPi * kPi);
}

SliceReport slice_check(const SampledField& f, const Eigen::Vector2d& xi, int n_t, double t_half_width,
                        const RadonOptions& opt) {
  check_planar(f);
  check_stencil(opt.interp_points);
  if (std::abs(xi.norm() - 1.0) > 1e-12) throw Error(errc::kNonUnitDirection, "slice_check: direction must be unit-norm");
  const double t_min = -t_half_width;
  const double dt = 2.0 * t_half_width / (n_t - 1);
  const Eigen::VectorXd col = radon_column(f, xi, t_min, dt, n_t, opt.interp_points);

  Eigen::FFT<double> fft;
  std::vector<double> in(col.data(), col.data() + n_t);
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, in);

  SliceReport report;
  report.direction = xi;
  double max_diff = 0.0;
  for (int k = 0; k <= n_t / 4; ++k) {
    const double w = 2.0 * kPi * k / (n_t * dt);
    // Column transform in the (2 pi)^{-1} convention; t_min shifts the phase.
    const std::complex<double> lhs = spec[k] * std::polar(1.0, -w * t_min) * dt / (2.0 * kPi);
    const std::complex<double> rhs = 2.0 * kPi * fourier_transform_2d(f, w * xi);
    max_diff = std::max(max_diff, std::abs(lhs - rhs));
    report.max_magnitude = std::max(report.max_magnitude, std::abs(rhs));
    ++report.frequencies;
  }
  report.max_abs_error = max_diff;
  report.max_rel_error = report.max_magnitude > 0.0 ? max_diff / report.max_magnitude : max_diff;
  return report;
}

RidgeProfile RidgeProfile::truncated_power(int m) {
  if (m < 2) throw Error(errc::kInvalidArgument, "truncated_power: m must be >= 2");
  return function([m](double t) {
    if (!(t > 0.0)) return 0.0;
    double v = 1.0;
    for (int k = 1; k < m; ++k) v *= t / k;
    return v;
  });
}

int find_direction_column(const SinogramGrid& layout, const Eigen::Vector2d& xi, double angular_tol, int& sign) {
  double theta = std::atan2(xi.y(), xi.x());
  if (theta < 0.0) theta += 2.0 * kPi;
  sign = 1;
  if (theta >= kPi) {
    theta -= kPi;
    sign = -1;
  }
  int k = static_cast<int>(std::lround(theta / layout.dtheta()));
  const double miss = std::abs(theta - k * layout.dtheta());
  if (k == layout.n_dir()) {
    k = 0;
    sign = -sign;
  }
  if (miss > angular_tol) return -1;
  return k;
}

SinogramGrid radon_of_ridge(const RidgeProfile& profile, double t0, const Eigen::VectorXd& xi0,
                            const SinogramGrid& layout, double angular_tol) {
  if (xi0.size() != 2) throw Error(errc::kUnsupportedDimension, "radon_of_ridge: planar directions only");
  if (std::abs(xi0.norm() - 1.0) > 1e-12) throw Error(errc::kNonUnitDirection, "radon_of_ridge: direction must be unit-norm");
  int sign = 1;
  const int k = find_direction_column(layout, Eigen::Vector2d(xi0[0], xi0[1]), angular_tol, sign);
  if (k < 0) throw Error(errc::kDirectionNotOnGrid, "radon_of_ridge: no grid direction matches xi0");

  SinogramGrid g = layout;
  g.values.setZero();
  g.parity = Parity::even;
  const double density = 0.5 / g.dtheta();
  if (profile.kind == RidgeProfile::Kind::dirac) {
    const double center = sign > 0 ? t0 : -t0;
    const double p = (center - g.t_min) / g.dt();
    const int i = static_cast<int>(std::floor(p));
    const double frac = p - i;
    if (i >= 0 && i < g.n_t()) g.values(i, k) += (1.0 - frac) * density / g.dt();
    if (i + 1 >= 0 && i + 1 < g.n_t()) g.values(i + 1, k) += frac * density / g.dt();
    return g;
  }
  for (int i = 0; i < g.n_t(); ++i) {
    const double t = g.t(i);
    g.values(i, k) = density * (sign > 0 ? profile.r(t - t0) : profile.r(-t - t0));
  }
  return g;
}

void write_sinogram(const std::string& path, const SinogramGrid& g) {
  static_assert(std::endian::native == std::endian::little, "sinogram I/O assumes a little-endian host");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(errc::kInputNotFound, "cannot open " + path + " for writing");
  const std::uint64_t header[2] = {static_cast<std::uint64_t>(g.n_t()), static_cast<std::uint64_t>(g.n_dir())};
  const double range[2] = {g.t_min, g.t_max};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  out.write(reinterpret_cast<const char*>(range), sizeof(range));
  out.write(reinterpret_cast<const char*>(g.values.data()), static_cast<std::streamsize>(sizeof(double) * g.values.size()));

  nlohmann::json side;
  side["n_t"] = g.n_t();
  side["n_dir"] = g.n_dir();
  side["t_min"] = g.t_min;
  side["t_max"] = g.t_max;
  side["parity"] = g.parity == Parity::even ? "even" : "odd";
  side["layout"] = "header u64 n_t, u64 n_dir, f64 t_min, f64 t_max; values f64 little-endian, column-major (t fastest)";
  std::vector<double> angles(g.n_dir());
  for (int k = 0; k < g.n_dir(); ++k) angles[k] = g.angle(k);
  side["angles"] = angles;
  std::ofstream js(path + ".json");
  js << side.dump(2) << '\n';
}

SinogramGrid read_sinogram(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(errc::kInputNotFound, "cannot open " + path);
  std::uint64_t header[2];
  double range[2];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  in.read(reinterpret_cast<char*>(range), sizeof(range));
  if (!in) throw Error(errc::kParseError, "truncated sinogram header in " + path);
  SinogramGrid g = SinogramGrid::layout(static_cast<int>(header[0]), range[0], range[1], static_cast<int>(header[1]));
  in.read(reinterpret_cast<char*>(g.values.data()), static_cast<std::streamsize>(sizeof(double) * g.values.size()));
  if (!in) throw Error(errc::kParseError, "truncated sinogram values in " + path);
  std::ifstream js(path + ".json");
  if (js) {
    const nlohmann::json side = nlohmann::json::parse(js, nullptr, false);
    if (!side.is_discarded() && side.contains("parity") && side["parity"] == "odd") g.parity = Parity::odd;
  }
  return g;
}

}  // namespace lizkit
