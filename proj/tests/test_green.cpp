#include <doctest.h>

#include <cmath>
#include <random>

#include "lizkit/green.hpp"
#include "support/approx.hpp"

using namespace lizkit;

namespace {

// 20-digit references computed with mpmath
struct GammaRef {
  double x, value;
};
constexpr GammaRef kGamma[] = {
    {0.5, 1.7724538509055160273},  {1.5, 0.88622692545275801365}, {2.5, 1.3293403881791370205},
    {-0.5, -3.5449077018110320546}, {-1.5, 2.3632718012073547031}, {1.0, 1.0},
    {5.0, 24.0},                    {1.0 / 3.0, 2.6789385347077477889}, {0.25, 3.6256099082219083119},
    {0.75, 1.2254167024651776451},  {-0.25, -4.9016668098607105805}, {10.5, 1133278.3889487855673},
};

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

Eigen::VectorXd random_point(std::mt19937_64& rng, int dim, double r_lo, double r_hi) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(std::log(r_lo), std::log(r_hi));
  Eigen::VectorXd x(dim);
  for (int i = 0; i < dim; ++i) x[i] = g(rng);
  return x.normalized() * std::exp(u(rng));
}

// Central differences of the kernel values only.
double finite_difference(const FracLaplaceKernel& k, const MultiIndex& idx, const Eigen::VectorXd& x, double h) {
  std::vector<int> axes;
  for (int i = 0; i < static_cast<int>(idx.size()); ++i)
    for (int r = 0; r < idx[i]; ++r) axes.push_back(i);
  auto shifted = [&](int i, double s) {
    Eigen::VectorXd y = x;
    y[i] += s;
    return y;
  };
  if (axes.empty()) return k(x);
  if (axes.size() == 1) return (k(shifted(axes[0], h)) - k(shifted(axes[0], -h))) / (2 * h);
  const int i = axes[0], j = axes[1];
  if (i == j) return (k(shifted(i, h)) - 2 * k(x) + k(shifted(i, -h))) / (h * h);
  auto at = [&](double si, double sj) {
    Eigen::VectorXd y = x;
    y[i] += si;
    y[j] += sj;
    return k(y);
  };
  return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
}

double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("gamma function matches the reference table") {
  for (const GammaRef& g : kGamma) {
    CAPTURE(g.x);
    CHECK(std::abs(std::tgamma(g.x) - g.value) <= 1e-12 * std::abs(g.value));
  }
}

TEST_CASE("one-dimensional Green's function") {
  CHECK(rho_1d(1.0, 3.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(rho_1d(1.0, -3.0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(rho_1d(1.5, -1.0) == 0.0);
  CHECK(std::abs(rho_1d(1.5, 4.0) - 2.2567583341910251478) <= 1e-12);
  CHECK(std::abs(rho_1d(3.0, 2.0) - 1.0) <= 1e-15);
  CHECK(std::abs(rho_1d(3.0, -2.0) + 1.0) <= 1e-15);
  CHECK_THROWS_KIND(rho_1d(0.0, 1.0), errc::kInvalidArgument);
}

TEST_CASE("kernel constants") {
  CHECK(std::abs(FracLaplaceKernel(2.5, 1).A() + 0.53192304053524357059) <= 1e-13);
  CHECK(std::abs(FracLaplaceKernel(3.5, 2).A() + 0.14798574911186678309) <= 1e-13);
  CHECK(std::abs(FracLaplaceKernel(3.5, 3).A() + 0.084658181245654626381) <= 1e-13);
  CHECK(std::abs(FracLaplaceKernel(1.5, 1).A() + 0.79788456080286535588) <= 1e-13);
  CHECK(std::abs(FracLaplaceKernel(4.0, 2).B() - 0.039788735772973833942) <= 1e-15);
  CHECK(FracLaplaceKernel(4.0, 2).kind() == FracLaplaceKernel::Case::log);
  CHECK(FracLaplaceKernel(2.0, 1).kind() == FracLaplaceKernel::Case::distributional);
  CHECK(FracLaplaceKernel(2.5, 1).kind() == FracLaplaceKernel::Case::power);
}

TEST_CASE("kernel values") {
  const FracLaplaceKernel k1(2.5, 1);
  const double a = -0.53192304053524357059;
  CHECK(std::abs(k_frac_laplace(k1, vec({1.0})) - a) <= 1e-13);
  CHECK(std::abs(k_frac_laplace(k1, vec({4.0})) - 8 * a) <= 1e-12);
  CHECK(std::abs(k_frac_laplace(k1, vec({-4.0})) - 8 * a) <= 1e-12);
  CHECK(k_frac_laplace(k1, vec({0.0})) == 0.0);

  const FracLaplaceKernel k2(4.0, 2);
  CHECK(k_frac_laplace(k2, vec({0.6, 0.8})) == doctest::Approx(0.0).epsilon(1e-15));
  const double e = std::exp(1.0);
  CHECK(std::abs(k_frac_laplace(k2, vec({e, 0.0})) - 0.039788735772973833942 * e * e) <= 1e-13);

  CHECK_THROWS_KIND(k_frac_laplace(FracLaplaceKernel(2.0, 1), vec({1.0})), errc::kDistributionalCase);
  CHECK_THROWS_KIND(k_frac_laplace(FracLaplaceKernel(1.5, 2), vec({0.0, 0.0})), errc::kOriginSingularity);
  CHECK_THROWS_KIND(k_frac_laplace(FracLaplaceKernel(2.0, 2), vec({0.0, 0.0})), errc::kOriginSingularity);
  CHECK_THROWS_KIND(k_frac_laplace(k1, vec({1.0, 2.0})), errc::kInvalidArgument);
}

TEST_CASE("three-dimensional Riesz kernel") {
  // alpha = 1, d = 3: k(x) = 1 / (2 pi^2 |x|^2)
  const FracLaplaceKernel k(1.0, 3);
  for (double r : {0.5, 1.0, 7.0}) CHECK(std::abs(k(vec({0.0, r, 0.0})) - 1.0 / (2 * M_PI * M_PI * r * r)) <= 1e-15 / (r * r));
  CHECK_THROWS_KIND(k_frac_laplace(FracLaplaceKernel(2.0, 3), vec({1.0, 0.0, 0.0})), errc::kDistributionalCase);
}

TEST_CASE("cutoff plateaus and seams") {
  const Cutoff chi;
  CHECK(chi(0.0) == 0.0);
  CHECK(chi(1.0) == 0.0);
  CHECK(chi(-0.7) == 0.0);
  CHECK(chi(2.0) == 1.0);
  CHECK(chi(-5.0) == 1.0);
  CHECK(chi(1.5) == doctest::Approx(0.5).epsilon(1e-15));
  double prev = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double v = chi(1.0 + i / 1000.0);
    CHECK(v >= prev);
    prev = v;
  }
  const double h = 1e-5;
  for (double seam : {1.0, 2.0}) {
    CHECK(std::abs(chi(seam + h) - chi(seam - h)) / (2 * h) <= 1e-8);
    CHECK(std::abs(chi(seam + h) - 2 * chi(seam) + chi(seam - h)) / (h * h) <= 1e-3);
  }
}

TEST_CASE("correction is inactive near the origin") {
  const Cutoff chi;
  std::mt19937_64 rng(51);
  for (const auto& [dim, alpha] : {std::pair{1, 2.5}, std::pair{2, 3.5}, std::pair{3, 4.7}}) {
    const FracLaplaceKernel k(alpha, dim);
    for (int rep = 0; rep < 50; ++rep) {
      const Eigen::VectorXd y = random_point(rng, dim, 0.01, 1.0);
      const Eigen::VectorXd x = random_point(rng, dim, 0.1, 30.0);
      CHECK(corrected_kernel_frac(k, chi, x, y) == k(x - y));
    }
  }
}

TEST_CASE("corrected kernel vanishes at x = 0 once the cutoff is saturated") {
  const Cutoff chi;
  std::mt19937_64 rng(53);
  for (const auto& [dim, alpha] : {std::pair{1, 2.5}, std::pair{2, 3.5}, std::pair{2, 4.3}, std::pair{1, 4.5}}) {
    const FracLaplaceKernel k(alpha, dim);
    for (int rep = 0; rep < 20; ++rep) {
      const Eigen::VectorXd y = random_point(rng, dim, 2.0, 500.0);
      CHECK(std::abs(corrected_kernel_frac(k, chi, Eigen::VectorXd::Zero(dim), y)) <= 1e-12 * std::abs(k(y)));
    }
  }
}

TEST_CASE("corrected kernel requires a non-integer excess order") {
  const Cutoff chi;
  CHECK_THROWS_KIND(corrected_kernel_frac(FracLaplaceKernel(1.5, 2), chi, vec({1, 0}), vec({3, 0})),
                    errc::kNotInValidRegime);
  CHECK_THROWS_KIND(corrected_kernel_frac(FracLaplaceKernel(3.0, 1), chi, vec({1}), vec({3})), errc::kNotInValidRegime);
}

TEST_CASE("corrected kernel decays in the far field") {
  const Cutoff chi;
  const FracLaplaceKernel k(2.5, 1);
  double prev = INFINITY;
  for (double yr : {10.0, 100.0, 1000.0}) {
    const double h = std::abs(corrected_kernel_frac(k, chi, vec({1.0}), vec({yr})));
    CHECK(h < prev);
    prev = h;
  }
  // leading remainder term A g(g-1)/2 |y|^(g-2) x^2 with g = 1.5
  CHECK(prev == doctest::Approx(std::abs(k.A()) * 1.5 * 0.5 / 2 * std::pow(1000.0, -0.5)).epsilon(1e-2));
}

TEST_CASE("corrected kernel equals the Taylor remainder computed independently") {
  // alpha = 2.5, d = 1: Taylor order 1, so h = A(|x-y|^1.5 - |y|^1.5 + 1.5 sign(y)|y|^0.5 x) for |y| >= 2
  const Cutoff chi;
  const FracLaplaceKernel k(2.5, 1);
  const double a = k.A();
  for (double y : {2.0, -3.5, 40.0}) {
    for (double x : {-2.0, 0.3, 5.0}) {
      const double expect =
          a * (std::pow(std::abs(x - y), 1.5) - std::pow(std::abs(y), 1.5) + 1.5 * std::copysign(1.0, y) * std::sqrt(std::abs(y)) * x);
      CHECK(std::abs(corrected_kernel_frac(k, chi, vec({x}), vec({y})) - expect) <= 1e-12 * std::pow(std::abs(y), 1.5));
    }
  }
}

TEST_CASE("truncated power profile") {
  CHECK(ridge_profile(2, 1.5) == 1.5);
  CHECK(ridge_profile(3, 2.0) == 2.0);
  for (int m = 2; m <= 6; ++m) CHECK(ridge_profile(m, -1.0) == 0.0);
  CHECK(ridge_profile(4, 3.0) == doctest::Approx(4.5).epsilon(1e-15));
}

TEST_CASE("property: truncated powers satisfy the refinement identity") {
  for (int m = 3; m <= 6; ++m) {
    for (double s : {-1.0, 0.0, 0.37, 1.0, 2.5, 4.0}) {
      const double integral =
          s <= 0.0 ? 0.0 : simpson([&](double u) { return ridge_profile(m - 1, s - u); }, 0.0, s, 2000);
      CAPTURE(m);
      CAPTURE(s);
      CHECK(std::abs(integral - ridge_profile(m, s)) <= 1e-8);
    }
  }
}

TEST_CASE("corrected ridge values") {
  const Eigen::VectorXd e1 = vec({1.0, 0.0});
  CHECK(corrected_ridge(2, e1, -0.5, e1) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(corrected_ridge(2, vec({3.0, 5.0}), 0.0, e1) == 3.0);
  CHECK(corrected_ridge(3, vec({3.0, 5.0}), 0.5, e1) == doctest::Approx(3.125).epsilon(1e-15));
  CHECK(corrected_ridge(2, vec({3.0, 5.0}), -1.5, e1) == 0.0);
  CHECK(corrected_ridge(3, vec({3.0, 5.0}), -2.0, e1) == 0.0);
  CHECK(corrected_ridge(2, vec({-3.0, 5.0}), -2.0, e1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_KIND(corrected_ridge(2, e1, 0.0, vec({1.0, 0.1})), errc::kNonUnitDirection);
  CHECK_THROWS_KIND(corrected_ridge(2, e1, 0.0, vec({1.0, 0.0, 0.0})), errc::kInvalidArgument);
}

TEST_CASE("property: corrected ridge is continuous in t and vanishes for large |t|") {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int rep = 0; rep < 40; ++rep) {
    const int m = 2 + rep % 3;
    const Eigen::VectorXd x = 3.0 * vec({u(rng), u(rng)});
    const double th = M_PI * u(rng);
    const Eigen::VectorXd xi = vec({std::cos(th), std::sin(th)});
    for (double t : {-1.0, 0.0, x.dot(xi)}) {
      const double eps = 1e-9;
      CHECK(std::abs(corrected_ridge(m, x, t + eps, xi) - corrected_ridge(m, x, t - eps, xi)) <= 1e-7);
    }
    for (double t : {-50.0, -5.0, 5.0, 50.0})
      CHECK(std::abs(corrected_ridge(m, x, t, xi)) <= 1e-14 * std::pow(1.0 + std::abs(t) + x.norm(), m - 1));
  }
}

TEST_CASE("growth ratio is the constant for k = 0 and the exponent times it for k = 1") {
  const FracLaplaceKernel k(2.5, 1);
  std::vector<Eigen::VectorXd> samples;
  for (int i = 0; i < 30; ++i) samples.push_back(vec({(i % 2 ? -1.0 : 1.0) * std::pow(100.0, i / 29.0)}));
  const GrowthReport r0 = verify_growth_bound(k, {0}, samples);
  for (const GrowthSample& s : r0.samples) CHECK(std::abs(s.ratio - std::abs(k.A())) <= 1e-13);
  CHECK(r0.passed);
  const GrowthReport r1 = verify_growth_bound(k, {1}, samples);
  for (const GrowthSample& s : r1.samples) CHECK(std::abs(s.ratio - 1.5 * std::abs(k.A())) <= 1e-13);
  CHECK(std::abs(r1.slope) <= 1e-10);
  CHECK_THROWS_KIND(verify_growth_bound(k, {3}, samples), errc::kMultiIndexTooLarge);
}

TEST_CASE("growth ratio of a planar first derivative is bounded") {
  const FracLaplaceKernel k(3.5, 2);
  std::vector<Eigen::VectorXd> samples;
  for (double r : {1.0, 10.0, 100.0})
    for (int j = 0; j < 24; ++j) samples.push_back(r * vec({std::cos(j * M_PI / 12), std::sin(j * M_PI / 12)}));
  const GrowthReport rep = verify_growth_bound(k, {1, 0}, samples);
  CHECK(rep.passed);
  CHECK(rep.bound_C <= 2.0 * std::abs(k.A()));
  for (const Eigen::VectorXd& x : samples) {
    const double h = 1e-5 * x.norm();
    const double fd = finite_difference(k, {1, 0}, x, h);
    const double scale = std::abs(k.A()) * std::pow(x.norm(), k.exponent() - 1);
    CHECK(std::abs(fd - k.derivative({1, 0}, x)) <= 1e-4 * scale);
  }
}

TEST_CASE("property: closed-form derivatives agree with finite differences") {
  std::mt19937_64 rng(61);
  for (const auto& [dim, alpha] :
       {std::pair{1, 2.5}, std::pair{2, 3.5}, std::pair{1, 1.5}, std::pair{3, 4.5}, std::pair{2, 2.3}}) {
    const FracLaplaceKernel k(alpha, dim, 2);
    for (const MultiIndex& idx : multi_indices_up_to(dim, 2)) {
      const int order = total_degree(idx);
      for (int rep = 0; rep < 100; ++rep) {
        const Eigen::VectorXd x = random_point(rng, dim, 0.5, 50.0);
        const double h = 1e-3 * x.norm();
        const double scale = std::abs(k.A()) * std::pow(x.norm(), k.exponent() - order);
        CAPTURE(alpha);
        CAPTURE(dim);
        CAPTURE(order);
        CHECK(std::abs(finite_difference(k, idx, x, h) - k.derivative(idx, x)) <= 1e-4 * scale);
      }
    }
  }
}

TEST_CASE("property: corrected kernel obeys a calibrated growth bound") {
  const Cutoff chi;
  std::mt19937_64 rng(67);
  for (const auto& [dim, alpha] : {std::pair{1, 2.5}, std::pair{2, 3.5}}) {
    const FracLaplaceKernel k(alpha, dim);
    auto ratio = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
      return std::abs(corrected_kernel_frac(k, chi, x, y)) / std::pow(x.norm() + 2.0, k.exponent());
    };
    double C = 0.0;
    for (int rep = 0; rep < 400; ++rep)
      C = std::max(C, ratio(random_point(rng, dim, 0.05, 50.0), random_point(rng, dim, 0.05, 1000.0)));
    for (int rep = 0; rep < 1000; ++rep)
      CHECK(ratio(random_point(rng, dim, 0.05, 50.0), random_point(rng, dim, 0.05, 1000.0)) <= 2.0 * C);
  }
}

TEST_CASE("derivative tables reproduce the homogeneous degree") {
  // Euler: sum_i x_i d_i ||x||^b = b ||x||^b
  const FracLaplaceKernel k(4.3, 3);
  const Eigen::VectorXd x = vec({0.3, -1.2, 2.0});
  double euler = 0.0;
  for (int i = 0; i < 3; ++i) {
    MultiIndex e(3, 0);
    e[i] = 1;
    euler += x[i] * k.power_derivative(e, x);
  }
  CHECK(std::abs(euler - k.exponent() * std::pow(x.norm(), k.exponent())) <= 1e-13 * std::pow(x.norm(), k.exponent()));
}
