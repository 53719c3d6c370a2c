#include "lizkit/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lizkit/errors.hpp"

namespace lizkit {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_into_period(double t, double period) {
  double r = std::fmod(t, period);
  if (r < 0.0) r += period;
  if (r >= period) r = 0.0;
  return r;
}

// Weights (n w0)^{-alpha} for n = 1..N, cached per thread for the last parameter set.
const std::vector<double>& green_weights(double alpha, double omega0, int order) {
  thread_local double cached_alpha = 0.0;
  thread_local double cached_omega = 0.0;
  thread_local std::vector<double> weights;
  if (cached_alpha != alpha || cached_omega != omega0 || static_cast<int>(weights.size()) != order) {
    weights.resize(order);
    for (int n = 1; n <= order; ++n) weights[n - 1] = std::pow(n * omega0, -alpha);
    cached_alpha = alpha;
    cached_omega = omega0;
  }
  return weights;
}

}  // namespace

FourierSeries::FourierSeries(double period, Eigen::VectorXcd coeffs, const Tolerances& tol)
    : period_(period), coeffs_(std::move(coeffs)) {
  if (!(period_ > 0.0)) throw Error(errc::kInvalidArgument, "FourierSeries: period must be positive");
  if (coeffs_.size() < 3 || coeffs_.size() % 2 == 0)
    throw Error(errc::kInvalidArgument, "FourierSeries: need 2N+1 coefficients with N >= 1");
  const int N = order();
  const double scale = std::max(1.0, coeffs_.cwiseAbs().maxCoeff());
  for (int n = 0; n <= N; ++n) {
    if (std::abs(coeffs_[N + n] - std::conj(coeffs_[N - n])) > tol.coefficient * scale)
      throw Error(errc::kInvalidArgument, "FourierSeries: coefficients are not Hermitian-symmetric");
  }
}

FourierSeries FourierSeries::zero(double period, int order) {
  return FourierSeries(period, Eigen::VectorXcd::Zero(2 * order + 1));
}

FourierSeries FourierSeries::from_function(double period, int order, const std::function<double(double)>& f,
                                           int samples) {
  if (samples <= 2 * order) throw Error(errc::kInvalidArgument, "from_function: too few samples");
  Eigen::VectorXd values(samples);
  for (int i = 0; i < samples; ++i) values[i] = f(period * i / samples);
  Eigen::VectorXcd c(2 * order + 1);
  for (int n = 0; n <= order; ++n) {
    std::complex<double> acc = 0.0;
    for (int i = 0; i < samples; ++i) acc += values[i] * std::polar(1.0, -2.0 * kPi * n * i / samples);
    acc /= static_cast<double>(samples);
    if (n == 0) acc = acc.real();
    c[order + n] = acc;
    c[order - n] = std::conj(acc);
  }
  return FourierSeries(period, std::move(c));
}

double FourierSeries::omega0() const { return 2.0 * kPi / period_; }

double FourierSeries::evaluate(double t) const {
  const int N = order();
  const std::complex<double> step = std::polar(1.0, omega0() * wrap_into_period(t, period_));
  std::complex<double> rot = step;
  double acc = 0.0;
  for (int n = 1; n <= N; ++n) {
    acc += (coeffs_[N + n] * rot).real();
    rot *= step;
  }
  return coeffs_[N].real() + 2.0 * acc;
}

Eigen::VectorXd FourierSeries::evaluate(const Eigen::VectorXd& t) const {
  Eigen::VectorXd out(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) out[i] = evaluate(t[i]);
  return out;
}

std::complex<double> frac_symbol(int n, double omega0, double alpha) {
  const double magnitude = std::pow(std::abs(n) * omega0, alpha);
  const double phase = alpha * kPi / 2.0 * (n > 0 ? 1.0 : -1.0);
  return std::polar(magnitude, phase);
}

FourierSeries frac_derivative(const FourierSeries& s, double alpha, const Tolerances& tol) {
  const int N = s.order();
  const Eigen::VectorXcd& c = s.coeffs();
  if (alpha < 0.0) {
    const double scale = c.cwiseAbs().maxCoeff();
    if (std::abs(c[N]) > tol.mean_zero * scale)
      throw Error(errc::kNonZeroMeanForIntegral, "frac_derivative: fractional integral of a signal with non-zero mean");
  }
  Eigen::VectorXcd out(c.size());
  out[N] = alpha == 0.0 ? c[N] : std::complex<double>(0.0);
  for (int n = 1; n <= N; ++n) {
    const std::complex<double> v = frac_symbol(n, s.omega0(), alpha) * c[N + n];
    out[N + n] = v;
    out[N - n] = std::conj(v);
  }
  return FourierSeries(s.period(), std::move(out));
}

FourierSeries project_mean_zero(const FourierSeries& s) {
  Eigen::VectorXcd out = s.coeffs();
  out[s.order()] = 0.0;
  return FourierSeries(s.period(), std::move(out));
}

double green_periodic(double alpha, double t, double period, int order) {
  if (!(alpha > 1.0)) throw Error(errc::kAlphaTooSmall, "green_periodic: requires alpha > 1");
  if (order < 1) throw Error(errc::kInvalidArgument, "green_periodic: truncation order must be >= 1");
  if (!(period > 0.0)) throw Error(errc::kInvalidArgument, "green_periodic: period must be positive");
  const double w0 = 2.0 * kPi / period;
  const std::vector<double>& weights = green_weights(alpha, w0, order);
  const std::complex<double> step = std::polar(1.0, w0 * wrap_into_period(t, period));
  std::complex<double> rot = step;
  std::complex<double> acc = 0.0;
  for (int n = 1; n <= order; ++n) {
    acc += weights[n - 1] * rot;
    rot *= step;
  }
  // exp(-j alpha pi/2) is common to every positive-n term.
  return 2.0 * (acc * std::polar(1.0, -alpha * kPi / 2.0)).real();
}

double lizorkin_dirac_pairing(double t0, const FourierSeries& phi) {
  const int N = phi.order();
  double acc = 0.0;
  for (int n = 1; n <= N; ++n) acc += (phi[n] * std::polar(1.0, n * phi.omega0() * t0)).real();
  return 2.0 * acc;
}

AtomicMeasure1D::AtomicMeasure1D(std::vector<Atom1D> atoms, double period) : atoms_(std::move(atoms)), period_(period) {
  if (!(period_ > 0.0)) throw Error(errc::kInvalidArgument, "AtomicMeasure1D: period must be positive");
  for (Atom1D& a : atoms_) a.location = wrap_into_period(a.location, period_);
}

double mnorm_atomic(const AtomicMeasure1D& mu, const Tolerances& tol) {
  std::vector<double> locations;
  locations.reserve(mu.size());
  double total = 0.0;
  for (const Atom1D& a : mu.atoms()) {
    total += std::abs(a.weight);
    locations.push_back(a.location);
  }
  std::sort(locations.begin(), locations.end());
  const double min_gap = tol.atom_gap * mu.period();
  for (std::size_t i = 1; i < locations.size(); ++i) {
    if (locations[i] - locations[i - 1] <= min_gap)
      throw Error(errc::kDuplicateAtoms, "mnorm_atomic: atom locations coincide; merge them first");
  }
  if (locations.size() > 1 && locations.front() + mu.period() - locations.back() <= min_gap)
    throw Error(errc::kDuplicateAtoms, "mnorm_atomic: atom locations coincide across the period boundary");
  return total;
}

double mean_free_bump(double u) {
  if (std::abs(u) >= 1.0) return 0.0;
  const double u2 = u * u;
  return (1.0 - 5.0 * u2) * (1.0 - u2);
}

DiracSaturation projected_dirac_saturation(double t0, double period, double eps, int order, int grid) {
  if (!(eps > 0.0) || !(eps < period / 2.0))
    throw Error(errc::kInvalidArgument, "projected_dirac_saturation: need 0 < eps < T/2");
  auto bump = [&](double t) {
    double d = wrap_into_period(t - t0, period);
    if (d > period / 2.0) d -= period;
    return mean_free_bump(d / eps);
  };
  const FourierSeries phi = project_mean_zero(FourierSeries::from_function(period, order, bump, grid));
  double sup = 0.0;
  for (int i = 0; i < grid; ++i) sup = std::max(sup, std::abs(phi.evaluate(period * i / grid)));
  sup = std::max(sup, std::abs(phi.evaluate(t0)));
  DiracSaturation out{};
  out.pairing = lizorkin_dirac_pairing(t0, phi);
  out.sup_norm = sup;
  out.ratio = sup > 0.0 ? out.pairing / sup : 0.0;
  return out;
}

}  // namespace lizkit
