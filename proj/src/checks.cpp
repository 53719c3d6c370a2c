#include "lizkit/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "lizkit/errors.hpp"
#include "lizkit/fourier.hpp"
#include "lizkit/green.hpp"
#include "lizkit/radon.hpp"
#include "lizkit/solver.hpp"

namespace lizkit {

namespace {

struct Suite {
  const CheckOptions& opt;
  std::mt19937_64 rng;
  std::vector<CheckResult> out;

  void record(const std::string& group, const std::string& name, double measured, double tolerance) {
    const double tol = tolerance * opt.tolerance_scale;
    out.push_back({group, name, measured, tol, std::isfinite(measured) && measured <= tol});
  }
};

FourierSeries random_mean_zero(std::mt19937_64& rng, int order) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(2 * order + 1);
  for (int n = 1; n <= order; ++n) {
    c[order + n] = {g(rng), g(rng)};
    c[order - n] = std::conj(c[order + n]);
  }
  return FourierSeries(1.0, c);
}

double coefficient_l1(const FourierSeries& a, const FourierSeries& b) {
  return (a.coeffs() - b.coeffs()).cwiseAbs().sum();
}

void check_roundtrip(Suite& s) {
  for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
      const FourierSeries x = random_mean_zero(s.rng, 256);
      // sum |c| bounds the sup norm of the difference
      worst = std::max(worst, coefficient_l1(frac_derivative(frac_derivative(x, alpha), -alpha), x));
    }
    std::ostringstream name;
    name << "integral_of_derivative_alpha_" << alpha;
    s.record("roundtrip", name.str(), worst, 1e-9);
  }
}

void check_projector(Suite& s) {
  double idem = 0.0, mean = 0.0, pairing = 0.0;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    FourierSeries x = random_mean_zero(s.rng, 64);
    Eigen::VectorXcd c = x.coeffs();
    c[64] = 3.0 * u(s.rng) - 1.5;
    x = FourierSeries(1.0, c);
    const FourierSeries p = project_mean_zero(x);
    idem = std::max(idem, (project_mean_zero(p).coeffs() - p.coeffs()).cwiseAbs().maxCoeff());
    mean = std::max(mean, std::abs(p.mean()));
    for (int k = 0; k < 8; ++k) {
      const double t0 = u(s.rng);
      pairing = std::max(pairing, std::abs(lizorkin_dirac_pairing(t0, p) - p.evaluate(t0)));
    }
  }
  s.record("projector", "idempotent", idem, 0.0);
  s.record("projector", "mean_removed", mean, 1e-14);
  s.record("projector", "dirac_pairing", pairing, 1e-10);
}

void check_mnorm(Suite& s) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<Atom1D> atoms;
    double total = 0.0;
    for (int k = 0; k < 7; ++k) {
      atoms.push_back({u(s.rng), (k + 0.5 + 0.4 * u(s.rng)) / 7.0});
      total += std::abs(atoms.back().weight);
    }
    worst = std::max(worst, std::abs(mnorm_atomic(AtomicMeasure1D(atoms)) - total) / total);
  }
  s.record("mnorm", "atomic_exact", worst, 1e-15);
  const DiracSaturation sat = projected_dirac_saturation(0.3, 1.0, 0.02);
  s.record("mnorm", "dirac_saturation_gap", 1.0 - sat.ratio, 0.01);
}

SampledField gaussian() {
  return SampledField::sample(129, 0.125, [](double x, double y) { return std::exp(-(x * x + y * y) / 2); });
}

SampledField odd_gaussian() {
  return SampledField::sample(129, 0.125, [](double x, double y) { return x * std::exp(-(x * x + y * y) / 2); });
}

void check_slice(Suite& s) {
  const int n_dir = 180;
  for (const auto& [name, field, tol] :
       {std::tuple{"gaussian", gaussian(), 1e-6}, std::tuple{"odd_gaussian", odd_gaussian(), 1e-5}}) {
    double err = 0.0, mag = 0.0;
    for (int k = 0; k < n_dir; ++k) {
      const double th = k * M_PI / n_dir;
      const SliceReport r = slice_check(field, Eigen::Vector2d(std::cos(th), std::sin(th)), 256, 10.0);
      err = std::max(err, r.max_abs_error);
      mag = std::max(mag, r.max_magnitude);
    }
    s.record("slice", name, err / mag, tol);
  }
}

void check_inversion(Suite& s) {
  const SampledField phi =
      SampledField::sample(129, 0.125, [](double x, double y) { return (x * x - y * y) * std::exp(-(x * x + y * y)); });
  const SinogramGrid layout = SinogramGrid::layout(513, -12.0, 12.0, 180);
  const SampledField back = backproject(filter_Krad(radon(phi, layout)), 129, 0.125);
  s.record("inversion", "filtered_backprojection",
           (back.values - phi.values).cwiseAbs().maxCoeff() / phi.values.cwiseAbs().maxCoeff(), 1e-3);
}

void check_adjoint(Suite& s) {
  const SampledField f = SampledField::sample(
      129, 0.125, [](double x, double y) { return std::exp(-((x - 0.7) * (x - 0.7) + 2.0 * (y + 0.4) * (y + 0.4))); });
  SinogramGrid g = SinogramGrid::layout(513, -12.0, 12.0, 180);
  for (int k = 0; k < g.n_dir(); ++k) {
    const double th = g.angle(k);
    for (int i = 0; i < g.n_t(); ++i) {
      const double d = g.t(i) - 0.5 * std::cos(th);
      g.values(i, k) = std::exp(-2.0 * d * d) * (1.0 + 0.3 * std::sin(2.0 * th));
    }
  }
  const double lhs = radon_pairing(radon(f, g), g);
  const double rhs = field_pairing(f, backproject(g, 129, 0.125));
  s.record("adjoint", "radon_backprojection", std::abs(lhs - rhs) / std::abs(lhs), 1e-4);
}

void check_isotropy(Suite& s) {
  const SinogramGrid g = radon(gaussian(), SinogramGrid::layout(257, -10.0, 10.0, 180));
  double spread = 0.0;
  for (int k = 1; k < g.n_dir(); ++k) spread = std::max(spread, (g.values.col(k) - g.values.col(0)).cwiseAbs().maxCoeff());
  s.record("isotropy", "radial_columns_equal", spread / g.values.cwiseAbs().maxCoeff(), 1e-8);
}

void check_parity(Suite& s) {
  const SinogramGrid g = radon(odd_gaussian(), SinogramGrid::layout(257, -10.0, 10.0, 180));
  const Eigen::MatrixXd flipped = g.values.colwise().reverse();
  s.record("parity", "odd_field_odd_sinogram", (g.values + flipped).cwiseAbs().maxCoeff() / g.values.cwiseAbs().maxCoeff(),
           1e-10);
}

void check_ridge(Suite& s) {
  const SinogramGrid layout = SinogramGrid::layout(401, -2.0, 2.0, 180);
  const double th = layout.angle(37);
  const Eigen::Vector2d xi(std::cos(th), std::sin(th));
  const double tv = radon_total_variation(radon_of_ridge(RidgeProfile::dirac(), 0.3137, xi, layout));
  s.record("ridge", "dirac_column_mass", std::abs(tv - 1.0), 1e-12);
  const double tv_flip = radon_total_variation(radon_of_ridge(RidgeProfile::dirac(), -0.3137, -xi, layout));
  s.record("ridge", "antipodal_column_mass", std::abs(tv_flip - 1.0), 1e-12);
}

Eigen::VectorXd on_direction(int dim, double r, double angle) {
  Eigen::VectorXd x(dim);
  if (dim == 1)
    x[0] = std::cos(angle) >= 0.0 ? r : -r;
  else
    x << r * std::cos(angle), r * std::sin(angle);
  return x;
}

void check_growth(Suite& s) {
  for (const auto& [dim, alpha] : {std::pair{1, 2.5}, std::pair{2, 3.5}}) {
    const FracLaplaceKernel kern(alpha, dim, 2);
    std::vector<Eigen::VectorXd> samples;
    const int n_dirs = dim == 1 ? 2 : 16;
    for (int i = 0; i < 25; ++i) {
      const double r = std::pow(100.0, i / 24.0);
      for (int j = 0; j < n_dirs; ++j) samples.push_back(on_direction(dim, r, (j + 0.37) * 2.0 * M_PI / n_dirs));
    }
    const std::string tag = "d" + std::to_string(dim) + "_alpha" + std::to_string(alpha).substr(0, 3);
    double fd_worst = 0.0, slope_worst = 0.0;
    for (const MultiIndex& k : multi_indices_up_to(dim, 2)) {
      const GrowthReport rep = verify_growth_bound(kern, k, samples);
      slope_worst = std::max(slope_worst, std::abs(rep.slope));
      const int order = total_degree(k);
      if (order == 0) {
        for (const Eigen::VectorXd& x : samples)
          fd_worst = std::max(fd_worst, std::abs(kern(x) - kern.derivative(k, x)) / std::abs(kern(x)));
        continue;
      }
      // difference the closed form one order lower along the first nonzero axis
      const int axis = static_cast<int>(std::find_if(k.begin(), k.end(), [](int v) { return v > 0; }) - k.begin());
      MultiIndex lower = k;
      --lower[axis];
      for (const Eigen::VectorXd& x : samples) {
        const double h = 1e-4 * x.norm();
        Eigen::VectorXd xp = x, xm = x;
        xp[axis] += h;
        xm[axis] -= h;
        const double fd = (kern.derivative(lower, xp) - kern.derivative(lower, xm)) / (2.0 * h);
        const double scale = std::abs(kern.A()) * std::pow(x.norm(), kern.exponent() - order);
        fd_worst = std::max(fd_worst, std::abs(fd - kern.derivative(k, x)) / scale);
      }
    }
    s.record("growth", tag + "_finite_difference", fd_worst, 1e-4);
    s.record("growth", tag + "_ratio_slope", slope_worst, 0.02);
  }
}

void check_decay(Suite& s) {
  const Cutoff chi;
  for (const auto& [dim, alpha] : {std::pair{1, 2.5}, std::pair{2, 3.5}}) {
    const FracLaplaceKernel kern(alpha, dim, 2);
    const std::string tag = "d" + std::to_string(dim) + "_alpha" + std::to_string(alpha).substr(0, 3);
    double violations = 0.0;
    for (double xr : {0.3, 1.0, 3.0}) {
      const Eigen::VectorXd x = on_direction(dim, xr, 0.4);
      double prev = INFINITY;
      for (double yr : {10.0, 100.0, 1000.0}) {
        const double h = std::abs(corrected_kernel_frac(kern, chi, x, on_direction(dim, yr, 2.1)));
        if (!(h < prev)) violations += 1.0;
        prev = h;
      }
    }
    s.record("decay", tag + "_monotone_in_y", violations, 0.0);

    auto ratio = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
      return std::abs(corrected_kernel_frac(kern, chi, x, y)) / std::pow(x.norm() + 2.0, kern.exponent());
    };
    double C = 0.0;
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j)
        for (int a = 0; a < 6; ++a) {
          const Eigen::VectorXd x = on_direction(dim, std::pow(50.0, i / 11.0) - 0.9, a * M_PI / 3.0);
          const Eigen::VectorXd y = on_direction(dim, std::pow(1000.0, j / 11.0) - 0.95, a * M_PI / 5.0 + 0.3);
          if ((x - y).norm() > 1e-6) C = std::max(C, ratio(x, y));
        }
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int n = 0; n < 2000; ++n) {
      const Eigen::VectorXd x = on_direction(dim, std::pow(50.0, u(s.rng)) - 0.9, 2.0 * M_PI * u(s.rng));
      const Eigen::VectorXd y = on_direction(dim, std::pow(1000.0, u(s.rng)) - 0.95, 2.0 * M_PI * u(s.rng));
      if ((x - y).norm() > 1e-6) worst = std::max(worst, ratio(x, y) / (2.0 * C));
    }
    s.record("decay", tag + "_calibrated_bound", worst, 1.0);
  }
}

void check_seminorm(Suite& s) {
  const SeminormOptions so;
  const double th = 20.0 * M_PI / so.n_dir;
  RidgeModel model;
  model.family = RidgeFamily{2, 2, false};
  model.atoms.push_back({1.0, 0.3, Eigen::Vector2d(std::cos(th), std::sin(th))});
  s.record("seminorm", "single_ridge", verify_seminorm_ridge(model, so).rel_deviation, 0.1);
}

const std::vector<std::pair<std::string, std::function<void(Suite&)>>>& registry() {
  static const std::vector<std::pair<std::string, std::function<void(Suite&)>>> groups{
      {"roundtrip", check_roundtrip}, {"projector", check_projector}, {"mnorm", check_mnorm},
      {"slice", check_slice},         {"inversion", check_inversion}, {"adjoint", check_adjoint},
      {"isotropy", check_isotropy},   {"parity", check_parity},       {"ridge", check_ridge},
      {"growth", check_growth},       {"decay", check_decay},         {"seminorm", check_seminorm}};
  return groups;
}

}  // namespace

std::vector<std::string> check_groups() {
  std::vector<std::string> names;
  for (const auto& g : registry()) names.push_back(g.first);
  return names;
}

std::vector<std::string> radon_check_groups() { return {"slice", "inversion", "adjoint", "isotropy", "parity", "ridge"}; }

std::vector<CheckResult> run_checks(const CheckOptions& options) {
  const std::vector<std::string> all = check_groups();
  for (const std::string& g : options.only)
    if (std::find(all.begin(), all.end(), g) == all.end()) throw Error(errc::kInvalidArgument, "unknown check group \"" + g + "\"");
  if (!(options.tolerance_scale > 0.0)) throw Error(errc::kInvalidArgument, "tolerance scale must be positive");

  Suite suite{options, std::mt19937_64(options.seed), {}};
  for (const auto& [name, run] : registry()) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), name) == options.only.end()) continue;
    run(suite);
  }
  return suite.out;
}

std::string checks_csv(const std::vector<CheckResult>& results) {
  std::ostringstream os;
  os.precision(17);
  os << "check,measured,tolerance,pass\n";
  for (const CheckResult& r : results)
    os << r.group << '.' << r.name << ',' << r.measured << ',' << r.tolerance << ',' << (r.pass ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace lizkit
