#include "lizkit/green.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

#include "lizkit/errors.hpp"

namespace lizkit {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kIntTol = 1e-12;

bool is_integer(double v) { return std::abs(v - std::round(v)) < kIntTol; }

bool is_nonnegative_integer(double v) { return v > -kIntTol && is_integer(v); }

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

double rho_1d(double alpha, double t) {
  if (!(alpha > 0.0)) throw Error(errc::kInvalidArgument, "rho_1d: alpha must be positive");
  const double p = alpha - 1.0;
  if (is_nonnegative_integer(p)) {
    const int n = static_cast<int>(std::lround(p));
    const double sign = t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0);
    return sign / 2.0 * std::pow(t, n) / factorial(n);
  }
  if (t < 0.0) return 0.0;
  if (t == 0.0) return p > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::pow(t, p) / std::tgamma(alpha);
}

FracLaplaceKernel::FracLaplaceKernel(double alpha, int dim, int max_derivative_order)
    : alpha_(alpha), dim_(dim), a_const_(std::numeric_limits<double>::quiet_NaN()),
      b_const_(std::numeric_limits<double>::quiet_NaN()) {
  if (!(alpha > 0.0)) throw Error(errc::kInvalidArgument, "FracLaplaceKernel: alpha must be positive");
  if (dim < 1) throw Error(errc::kInvalidArgument, "FracLaplaceKernel: dimension must be >= 1");
  const double beta = exponent();
  const double half_d = dim / 2.0;
  if (is_nonnegative_integer(beta / 2.0)) {
    case_ = Case::log;
    log_n_ = static_cast<int>(std::lround(beta / 2.0));
    const double sign = (log_n_ % 2 == 0) ? -1.0 : 1.0;  // (-1)^{1+n}
    b_const_ = sign / (std::pow(2.0, 2 * log_n_ + dim - 1) * std::pow(kPi, half_d) *
                       std::tgamma(log_n_ + half_d) * factorial(log_n_));
  } else if (is_integer(alpha / 2.0)) {
    case_ = Case::distributional;
  } else {
    case_ = Case::power;
    a_const_ = std::tgamma((dim - alpha) / 2.0) / (std::pow(2.0, alpha) * std::pow(kPi, half_d) * std::tgamma(alpha / 2.0));
  }

  max_order_ = std::max(max_derivative_order, static_cast<int>(std::ceil(beta - kIntTol)));
  max_order_ = std::max(max_order_, 0);
  const Polynomial r2 = Polynomial::squared_norm(dim);
  for (const MultiIndex& k : multi_indices_up_to(dim, max_order_)) {
    const int deg = total_degree(k);
    if (deg == 0) {
      tables_.emplace(k, Polynomial::constant(dim, 1.0));
      continue;
    }
    const int i = static_cast<int>(std::find_if(k.begin(), k.end(), [](int v) { return v > 0; }) - k.begin());
    MultiIndex parent = k;
    parent[i] -= 1;
    const Polynomial& p = tables_.at(parent);
    const double gamma = beta - 2.0 * (deg - 1);
    tables_.emplace(k, r2 * p.derivative(i) + gamma * (Polynomial::coordinate(dim, i) * p));
  }

  if (corrected_regime()) taylor_indices_ = multi_indices_up_to(dim, taylor_order());
}

bool FracLaplaceKernel::corrected_regime() const {
  return case_ == Case::power && alpha_ > dim_ && !is_integer(exponent());
}

int FracLaplaceKernel::taylor_order() const {
  return std::max(0, static_cast<int>(std::ceil(exponent() - 1.0 - kIntTol)));
}

double FracLaplaceKernel::operator()(const Eigen::VectorXd& x) const {
  if (x.size() != dim_) throw Error(errc::kInvalidArgument, "k_frac_laplace: point dimension mismatch");
  const double r = x.norm();
  switch (case_) {
    case Case::distributional:
      throw Error(errc::kDistributionalCase, "k_frac_laplace: alpha/2 is an integer; the kernel is not a pointwise function");
    case Case::log:
      if (r == 0.0) {
        if (log_n_ == 0) throw Error(errc::kOriginSingularity, "k_frac_laplace: logarithmic singularity at the origin");
        return 0.0;
      }
      return b_const_ * std::pow(r, 2 * log_n_) * std::log(r);
    case Case::power:
      break;
  }
  if (r == 0.0) {
    if (alpha_ <= dim_) throw Error(errc::kOriginSingularity, "k_frac_laplace: kernel is singular at the origin");
    return 0.0;
  }
  return a_const_ * std::pow(r, exponent());
}

const Polynomial& FracLaplaceKernel::derivative_polynomial(const MultiIndex& k) const {
  if (static_cast<int>(k.size()) != dim_) throw Error(errc::kInvalidArgument, "multi-index dimension mismatch");
  if (total_degree(k) > max_order_)
    throw Error(errc::kMultiIndexTooLarge, "FracLaplaceKernel: derivative order exceeds the precomputed tables");
  return tables_.at(k);
}

double FracLaplaceKernel::power_derivative(const MultiIndex& k, const Eigen::VectorXd& x) const {
  const Polynomial& p = derivative_polynomial(k);
  const double r2 = x.squaredNorm();
  return p(x) * std::pow(r2, (exponent() - 2.0 * total_degree(k)) / 2.0);
}

double FracLaplaceKernel::derivative(const MultiIndex& k, const Eigen::VectorXd& x) const {
  if (case_ != Case::power) throw Error(errc::kNotInValidRegime, "FracLaplaceKernel: derivatives need the power case");
  return a_const_ * power_derivative(k, x);
}

double FracLaplaceKernel::taylor_polynomial(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  if (!corrected_regime())
    throw Error(errc::kNotInValidRegime, "taylor_polynomial: needs alpha > d with alpha - d not an integer");
  const Eigen::VectorXd base = -y;
  double acc = 0.0;
  for (const MultiIndex& k : taylor_indices_) acc += power_derivative(k, base) / multi_factorial(k) * monomial(x, k);
  return a_const_ * acc;
}

double k_frac_laplace(const FracLaplaceKernel& kern, const Eigen::VectorXd& x) { return kern(x); }

double corrected_kernel_frac(const FracLaplaceKernel& kern, const Cutoff& chi, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& y) {
  if (!kern.corrected_regime())
    throw Error(errc::kNotInValidRegime, "corrected_kernel_frac: needs alpha > d with alpha - d not an integer");
  const double raw = kern(x - y);
  const double w = chi(y.norm());
  if (w == 0.0) return raw;
  return raw - w * kern.taylor_polynomial(x, y);
}

double corrected_ridge(int m, const Eigen::VectorXd& x, double t, const Eigen::VectorXd& xi, const Tolerances& tol) {
  if (m < 2) throw Error(errc::kInvalidArgument, "corrected_ridge: m must be >= 2");
  if (x.size() != xi.size()) throw Error(errc::kInvalidArgument, "corrected_ridge: dimension mismatch");
  if (std::abs(xi.norm() - 1.0) > tol.unit_norm) throw Error(errc::kNonUnitDirection, "corrected_ridge: direction is not unit-norm");
  const double s = x.dot(xi) - t;
  const double w = ridge_correction_weight(t);
  const double ramp = ridge_profile(m, s);
  if (w == 0.0) return ramp;
  double poly = 1.0;
  for (int k = 1; k < m; ++k) poly *= s / k;
  return ramp - w * poly;
}

GrowthReport verify_growth_bound(const FracLaplaceKernel& kern, const MultiIndex& k,
                                 const std::vector<Eigen::VectorXd>& samples, double slope_tolerance) {
  if (static_cast<int>(k.size()) != kern.dim()) throw Error(errc::kInvalidArgument, "verify_growth_bound: multi-index dimension mismatch");
  const int order = total_degree(k);
  if (order > static_cast<int>(std::ceil(kern.exponent() - kIntTol)) || order > kern.max_derivative_order())
    throw Error(errc::kMultiIndexTooLarge, "verify_growth_bound: |k| exceeds ceil(alpha - d)");
  GrowthReport report;
  report.k = k;
  std::vector<std::pair<double, double>> shells;  // (radius, max ratio)
  for (const Eigen::VectorXd& x : samples) {
    const double r = x.norm();
    if (r == 0.0) throw Error(errc::kInvalidArgument, "verify_growth_bound: sample at the origin");
    const double ratio = std::abs(kern.derivative(k, x)) / std::pow(r, kern.exponent() - order);
    report.samples.push_back({r, ratio});
    report.bound_C = std::max(report.bound_C, ratio);
    auto it = std::find_if(shells.begin(), shells.end(), [r](const auto& s) { return std::abs(s.first - r) <= 1e-9 * r; });
    if (it == shells.end())
      shells.emplace_back(r, ratio);
    else
      it->second = std::max(it->second, ratio);
  }
  std::erase_if(shells, [](const auto& s) { return !(s.second > 0.0); });
  if (shells.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (const auto& [r, q] : shells) {
      mx += std::log(r);
      my += std::log(q);
    }
    mx /= shells.size();
    my /= shells.size();
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [r, q] : shells) {
      sxy += (std::log(r) - mx) * (std::log(q) - my);
      sxx += (std::log(r) - mx) * (std::log(r) - mx);
    }
    report.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  }
  report.passed = std::isfinite(report.bound_C) && std::abs(report.slope) <= slope_tolerance;
  return report;
}

}  // namespace lizkit
