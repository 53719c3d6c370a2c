#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "lizkit/radon.hpp"
#include "support/approx.hpp"

using namespace lizkit;

namespace {

const double kSqrt2Pi = std::sqrt(2.0 * M_PI);

SampledField gaussian_field(int n, double h, double cx = 0.0, double cy = 0.0, double s = 1.0) {
  return SampledField::sample(n, h, [=](double x, double y) {
    return std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (2 * s * s));
  });
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("Gaussian projects to a Gaussian in every direction") {
  const SinogramGrid g = radon(gaussian_field(129, 0.125), SinogramGrid::layout(161, -8.0, 8.0, 36));
  double err = 0.0;
  for (int k = 0; k < g.n_dir(); ++k)
    for (int i = 0; i < g.n_t(); ++i)
      err = std::max(err, std::abs(g.values(i, k) - kSqrt2Pi * std::exp(-g.t(i) * g.t(i) / 2)));
  CHECK(err <= 1e-6);
}

TEST_CASE("shifting the field shifts each column by the projected offset") {
  const double cx = 0.5, cy = -0.25;
  const SinogramGrid g = radon(gaussian_field(129, 0.125, cx, cy), SinogramGrid::layout(161, -8.0, 8.0, 24));
  double err = 0.0;
  for (int k = 0; k < g.n_dir(); ++k) {
    const double p = g.direction(k).dot(Eigen::Vector2d(cx, cy));
    for (int i = 0; i < g.n_t(); ++i)
      err = std::max(err, std::abs(g.values(i, k) - kSqrt2Pi * std::exp(-(g.t(i) - p) * (g.t(i) - p) / 2)));
  }
  CHECK(err <= 1e-6);
}

TEST_CASE("radon transform input validation") {
  const SinogramGrid layout = SinogramGrid::layout(65, -4.0, 4.0, 8);
  CHECK(max_abs(radon(SampledField::zeros(33, 0.25), layout).values) == 0.0);
  CHECK_THROWS_KIND(radon(SampledField::sample(33, 0.25, [](double, double) { return 1.0; }), layout),
                    errc::kBoundaryMass);
  SampledField three = gaussian_field(33, 0.25);
  three.dim = 3;
  CHECK_THROWS_KIND(radon(three, layout), errc::kUnsupportedDimension);
  SampledField even;
  even.values = Eigen::MatrixXd::Zero(4, 4);
  CHECK_THROWS_KIND(radon(even, layout), errc::kInvalidArgument);
  CHECK_THROWS_KIND(SampledField::zeros(4, 1.0), errc::kInvalidArgument);
  CHECK_THROWS_KIND(SinogramGrid::layout(1, 0.0, 1.0, 4), errc::kInvalidArgument);
}

TEST_CASE("field parity shows up as column reflection symmetry") {
  const SinogramGrid layout = SinogramGrid::layout(129, -8.0, 8.0, 30);
  const SinogramGrid even = radon(
      SampledField::sample(97, 0.125, [](double x, double y) { return (1 + x * y) * std::exp(-(x * x + 2 * y * y)); }),
      layout);
  const SinogramGrid odd = radon(
      SampledField::sample(97, 0.125, [](double x, double y) { return (x - y * y * y) * std::exp(-(x * x + y * y)); }),
      layout);
  CHECK(even.parity == Parity::even);
  CHECK(odd.parity == Parity::even);
  const Eigen::MatrixXd ev = even.values.colwise().reverse(), od = odd.values.colwise().reverse();
  CHECK(max_abs(even.values - ev) <= 1e-10 * max_abs(even.values));
  CHECK(max_abs(odd.values + od) <= 1e-10 * max_abs(odd.values));
}

TEST_CASE("backprojection of constants") {
  SinogramGrid g = SinogramGrid::layout(101, -20.0, 20.0, 60);
  CHECK(max_abs(backproject(g, 33, 0.25).values) == 0.0);
  g.values.setOnes();
  const SampledField b = backproject(g, 33, 0.25);
  CHECK(max_abs(b.values.array() - 2 * M_PI) <= 1e-12);
}

TEST_CASE("backprojection of Gaussian columns matches the Bessel form") {
  // int_{S^1} exp(-<xi,x>^2/2) dxi = 2 pi exp(-|x|^2/4) I_0(|x|^2/4)
  SinogramGrid g = SinogramGrid::layout(801, -20.0, 20.0, 90);
  for (int i = 0; i < g.n_t(); ++i) g.values.row(i).setConstant(std::exp(-g.t(i) * g.t(i) / 2));
  const SampledField b = backproject(g, 33, 0.25);
  double err = 0.0;
  for (int i = 0; i < b.size(); ++i)
    for (int j = 0; j < b.size(); ++j) {
      const double q = (b.coord(i) * b.coord(i) + b.coord(j) * b.coord(j)) / 4;
      err = std::max(err, std::abs(b.values(i, j) - 2 * M_PI * std::exp(-q) * std::cyl_bessel_i(0.0, q)));
    }
  CHECK(err <= 1e-6);
}

TEST_CASE("property: backprojection is the adjoint of the transform") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SinogramGrid layout = SinogramGrid::layout(193, -12.0, 12.0, 90);
  for (int rep = 0; rep < 20; ++rep) {
    const SampledField f = gaussian_field(65, 0.25, 1.5 * u(rng), 1.5 * u(rng), 0.8 + 0.2 * u(rng));
    const double c = u(rng), phi = M_PI * u(rng), s = 0.8 + 0.3 * u(rng), a = 0.4 * u(rng), psi = M_PI * u(rng);
    SinogramGrid g = layout;
    for (int k = 0; k < g.n_dir(); ++k) {
      const double th = g.angle(k);
      for (int i = 0; i < g.n_t(); ++i) {
        const double d = g.t(i) - c * std::cos(th - phi);
        g.values(i, k) = std::exp(-d * d / (2 * s * s)) * (1 + a * std::sin(2 * th + psi));
      }
    }
    const double lhs = radon_pairing(radon(f, g), g);
    const double rhs = field_pairing(f, backproject(g, 65, 0.25));
    CHECK(std::abs(lhs - rhs) <= 1e-4 * std::abs(lhs));
  }
}

TEST_CASE("pairings integrate constants exactly") {
  SinogramGrid g = SinogramGrid::layout(11, -1.0, 1.0, 7);
  g.values.setOnes();
  // rectangle rule in t over all 11 samples, half-turn in theta doubled by parity
  CHECK(radon_pairing(g, g) == doctest::Approx(2 * M_PI * 11 * 0.2).epsilon(1e-14));
  CHECK(radon_total_variation(g) == doctest::Approx(2 * M_PI * 11 * 0.2).epsilon(1e-14));
  const SampledField f = SampledField::sample(3, 0.5, [](double, double) { return 1.0; });
  CHECK(field_pairing(f, f) == doctest::Approx(2.25).epsilon(1e-15));
}

TEST_CASE("column filter applies |w| / (4 pi) to a Gaussian") {
  SinogramGrid g = SinogramGrid::layout(513, -16.0, 16.0, 2);
  for (int i = 0; i < g.n_t(); ++i) g.values.row(i).setConstant(kSqrt2Pi * std::exp(-g.t(i) * g.t(i) / 2));
  const SinogramGrid out = filter_Krad(g);
  // (1 / 2 pi) int_0^inf w exp(-w^2/2) cos(w t) dw by Simpson's rule
  auto reference = [](double t) {
    const int n = 20000;
    const double b = 14.0, h = b / n;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double w = i * h;
      const double v = w * std::exp(-w * w / 2) * std::cos(w * t);
      s += v * (i == 0 || i == n ? 1.0 : (i % 2 ? 4.0 : 2.0));
    }
    return s * h / 3.0 / (2 * M_PI);
  };
  double err = 0.0, peak = 0.0;
  for (int i = 0; i < g.n_t(); i += 4) {
    if (std::abs(g.t(i)) > 8.0) continue;
    const double r = reference(g.t(i));
    err = std::max(err, std::abs(out.values(i, 0) - r));
    peak = std::max(peak, std::abs(r));
  }
  CHECK(err <= 1e-3 * peak);
  CHECK(max_abs(out.values.col(0) - out.values.col(1)) == 0.0);
}

TEST_CASE("property: column filter is linear") {
  std::mt19937_64 rng(73);
  std::normal_distribution<double> n01;
  SinogramGrid a = SinogramGrid::layout(129, -5.0, 5.0, 6), b = a;
  for (int k = 0; k < 6; ++k)
    for (int i = 0; i < 129; ++i) {
      a.values(i, k) = n01(rng) * std::exp(-a.t(i) * a.t(i));
      b.values(i, k) = n01(rng) * std::exp(-a.t(i) * a.t(i));
    }
  SinogramGrid c = a;
  c.values = 2.0 * a.values - 3.0 * b.values;
  const Eigen::MatrixXd lin = 2.0 * filter_Krad(a).values - 3.0 * filter_Krad(b).values;
  CHECK(max_abs(filter_Krad(c).values - lin) <= 1e-12 * max_abs(lin));
}

TEST_CASE("filtered backprojection inverts the transform on a zero-mean field") {
  const SampledField f = SampledField::sample(
      129, 0.125, [](double x, double y) { return (2.0 - x * x - y * y) * std::exp(-(x * x + y * y) / 2); });
  const SampledField back = backproject(filter_Krad(radon(f, SinogramGrid::layout(513, -12.0, 12.0, 180))), 129, 0.125);
  CHECK(max_abs(back.values - f.values) <= 1e-3 * max_abs(f.values));
}

TEST_CASE("t differencing") {
  SinogramGrid g = SinogramGrid::layout(21, -1.0, 1.0, 3);
  for (int i = 0; i < g.n_t(); ++i) g.values.row(i).setConstant(g.t(i) * g.t(i));
  const SinogramGrid d2 = differentiate_t(g, 2);
  const SinogramGrid d1 = differentiate_t(g, 1);
  CHECK(d2.parity == Parity::even);
  CHECK(d1.parity == Parity::odd);
  for (int i = 2; i < g.n_t() - 2; ++i) {
    CHECK(std::abs(d2.values(i, 1) - 2.0) <= 1e-10);
    CHECK(std::abs(d1.values(i, 1) - 2.0 * g.t(i)) <= 1e-12);
  }
  CHECK_THROWS_KIND(differentiate_t(g, -1), errc::kInvalidArgument);
}

TEST_CASE("planar Fourier transform of a Gaussian") {
  const SampledField f = gaussian_field(129, 0.125);
  for (const Eigen::Vector2d w : {Eigen::Vector2d(0, 0), Eigen::Vector2d(1.0, 0.5), Eigen::Vector2d(-2.0, 1.5)})
    CHECK(std::abs(fourier_transform_2d(f, w) - std::exp(-w.squaredNorm() / 2) / (2 * M_PI)) <= 1e-12);
}

TEST_CASE("Fourier slice identity on Gaussian and odd Gaussian fields") {
  const SampledField g = gaussian_field(129, 0.125);
  const SampledField o = SampledField::sample(129, 0.125, [](double x, double y) { return x * std::exp(-(x * x + y * y) / 2); });
  for (double th : {0.0, 0.3, 1.1, 2.9}) {
    const Eigen::Vector2d xi(std::cos(th), std::sin(th));
    const SliceReport rg = slice_check(g, xi, 256, 10.0);
    const SliceReport ro = slice_check(o, xi, 256, 10.0);
    CHECK(rg.frequencies > 0);
    CHECK(rg.max_rel_error <= 1e-6);
    CHECK(ro.max_abs_error <= 1e-5 * std::max(ro.max_magnitude, 1e-3));
  }
  const SliceReport z = slice_check(SampledField::zeros(33, 0.25), Eigen::Vector2d(1, 0), 64, 5.0);
  CHECK(z.max_abs_error == 0.0);
  CHECK(z.max_magnitude == 0.0);
  CHECK_THROWS_KIND(slice_check(g, Eigen::Vector2d(1, 1), 64, 5.0), errc::kNonUnitDirection);
}

TEST_CASE("concentrated Dirac column carries half the mass at the offset") {
  const SinogramGrid layout = SinogramGrid::layout(401, -2.0, 2.0, 180);
  const int k = 37;
  const Eigen::Vector2d xi = layout.direction(k);
  const double t0 = 0.3137;
  const SinogramGrid g = radon_of_ridge(RidgeProfile::dirac(), t0, xi, layout);
  CHECK(g.parity == Parity::even);
  const double mass = g.values.col(k).sum() * g.dt() * g.dtheta();
  double centroid = 0.0;
  for (int i = 0; i < g.n_t(); ++i) centroid += g.t(i) * g.values(i, k) * g.dt() * g.dtheta();
  CHECK(std::abs(mass - 0.5) <= 1e-14);
  CHECK(std::abs(centroid / mass - t0) <= 1e-12);
  CHECK(g.values.sum() == doctest::Approx(g.values.col(k).sum()).epsilon(1e-15));
  CHECK(std::abs(radon_total_variation(g) - 1.0) <= 1e-12);

  const SinogramGrid flip = radon_of_ridge(RidgeProfile::dirac(), t0, Eigen::Vector2d(-xi), layout);
  double c2 = 0.0;
  for (int i = 0; i < g.n_t(); ++i) c2 += g.t(i) * flip.values(i, k) * g.dt() * g.dtheta();
  CHECK(std::abs(c2 / 0.5 + t0) <= 1e-12);
}

TEST_CASE("concentrated profile column reflects for the antipodal direction") {
  const SinogramGrid layout = SinogramGrid::layout(201, -3.0, 3.0, 60);
  const int k = 11;
  auto r = [](double t) { return (1.0 + t) * std::exp(-(t - 0.2) * (t - 0.2)); };
  const double t0 = 0.4;
  const SinogramGrid g = radon_of_ridge(RidgeProfile::function(r), t0, layout.direction(k), layout);
  const SinogramGrid h = radon_of_ridge(RidgeProfile::function(r), t0, Eigen::Vector2d(-layout.direction(k)), layout);
  const double w = 1.0 / (2.0 * layout.dtheta());
  for (int i = 0; i < layout.n_t(); i += 7) {
    CHECK(std::abs(g.values(i, k) - w * r(g.t(i) - t0)) <= 1e-14 * w);
    CHECK(std::abs(h.values(i, k) - w * r(-g.t(i) - t0)) <= 1e-14 * w);
  }
  CHECK(max_abs(g.values) == max_abs(g.values.col(k)));
}

TEST_CASE("concentrated columns need a grid direction") {
  const SinogramGrid layout = SinogramGrid::layout(101, -2.0, 2.0, 180);
  const double th = 0.5 * layout.dtheta();
  CHECK_THROWS_KIND(radon_of_ridge(RidgeProfile::dirac(), 0.0, Eigen::Vector2d(std::cos(th), std::sin(th)), layout),
                    errc::kDirectionNotOnGrid);
  CHECK_THROWS_KIND(radon_of_ridge(RidgeProfile::dirac(), 0.0, Eigen::Vector2d(1.0, 0.1), layout),
                    errc::kNonUnitDirection);
  int sign = 0;
  CHECK(find_direction_column(layout, Eigen::Vector2d(-1.0, 0.0), 1e-9, sign) == 0);
  CHECK(sign == -1);
}

TEST_CASE("backprojected concentrated column is the ridge") {
  const SinogramGrid layout = SinogramGrid::layout(801, -16.0, 16.0, 90);
  const int k = 23;
  const Eigen::Vector2d xi = layout.direction(k);
  auto r = [](double t) { return std::exp(-t * t) * std::cos(2 * t); };
  const double t0 = -0.35;
  const SampledField b = backproject(radon_of_ridge(RidgeProfile::function(r), t0, xi, layout), 41, 0.25);
  double err = 0.0;
  for (int i = 0; i < b.size(); ++i)
    for (int j = 0; j < b.size(); ++j)
      err = std::max(err, std::abs(b.values(i, j) - r(xi.x() * b.coord(i) + xi.y() * b.coord(j) - t0)));
  CHECK(err <= 5e-3);
}

TEST_CASE("sinogram files round-trip exactly") {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "lizkit_test_radon";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "g.bin").string();
  SinogramGrid g = SinogramGrid::layout(17, -1.5, 2.25, 5);
  std::mt19937_64 rng(79);
  std::normal_distribution<double> n01;
  for (int k = 0; k < 5; ++k)
    for (int i = 0; i < 17; ++i) g.values(i, k) = n01(rng);
  g.parity = Parity::odd;
  write_sinogram(path, g);
  CHECK(std::filesystem::exists(path + ".json"));
  const SinogramGrid back = read_sinogram(path);
  CHECK(back.t_min == g.t_min);
  CHECK(back.t_max == g.t_max);
  CHECK(back.parity == Parity::odd);
  CHECK(back.values == g.values);

  CHECK_THROWS_KIND(read_sinogram((dir / "missing.bin").string()), errc::kInputNotFound);
  {
    std::ofstream(dir / "short.bin", std::ios::binary) << "abc";
  }
  CHECK_THROWS_KIND(read_sinogram((dir / "short.bin").string()), errc::kParseError);
  std::filesystem::remove_all(dir);
}
