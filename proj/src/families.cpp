#include "families.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "lizkit/errors.hpp"
#include "lizkit/polynomial.hpp"

namespace lizkit {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double wrap(double t, double period) {
  double r = std::fmod(t, period);
  if (r < 0.0) r += period;
  if (r >= period) r -= period;
  return r;
}

double angle_between(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::acos(std::clamp(a.dot(b), -1.0, 1.0));
}

int polynomial_dim(int dim, int degree) { return static_cast<int>(multi_indices_up_to(dim, degree).size()); }

}  // namespace

double Loss::value(double r) const {
  if (kind == Kind::quadratic || std::abs(r) <= delta) return 0.5 * r * r;
  return delta * (std::abs(r) - 0.5 * delta);
}

double Loss::influence(double r) const {
  if (kind == Kind::quadratic) return r;
  return std::clamp(r, -delta, delta);
}

std::string family_name(const Family& family) {
  return std::visit(Overloaded{[](const PeriodicFamily&) { return std::string("periodic"); },
                               [](const FracLapFamily&) { return std::string("fraclap"); },
                               [](const RidgeFamily&) { return std::string("ridge"); }},
                    family);
}

int family_dim(const Family& family) {
  return std::visit(Overloaded{[](const PeriodicFamily&) { return 1; }, [](const FracLapFamily& f) { return f.dim; },
                               [](const RidgeFamily& f) { return f.dim; }},
                    family);
}

Family model_family(const Model& model) {
  return std::visit([](const auto& m) -> Family { return m.family; }, model);
}

std::size_t atom_count(const Model& model) {
  return std::visit([](const auto& m) { return m.atoms.size(); }, model);
}

int atom_bound(const Family& family, int n_data) {
  return std::visit(Overloaded{[n_data](const PeriodicFamily&) { return std::max(0, n_data - 1); },
                               [n_data](const FracLapFamily&) { return n_data; },
                               [n_data](const RidgeFamily& f) {
                                 return f.polynomial ? std::max(0, n_data - polynomial_dim(f.dim, f.m - 1)) : n_data;
                               }},
                    family);
}

double evaluate_model(const Model& model, const Eigen::VectorXd& x) {
  return std::visit(
      Overloaded{
          [&x](const SplineModel& m) {
            if (x.size() != 1) throw Error(errc::kInvalidArgument, "evaluate_model: periodic models take scalar inputs");
            double v = m.offset;
            for (const Atom1D& a : m.atoms)
              v += a.weight * green_periodic(m.family.alpha, x[0] - a.location, m.family.period, m.family.order);
            return v;
          },
          [&x](const LizSplineModel& m) {
            if (x.size() != m.family.dim) throw Error(errc::kInvalidArgument, "evaluate_model: point dimension mismatch");
            const FracLaplaceKernel& kern = detail::cached_frac_kernel(m.family.alpha, m.family.dim);
            double v = 0.0;
            for (const PointAtom& a : m.atoms) v += a.weight * corrected_kernel_frac(kern, Cutoff{}, x, a.location);
            return v;
          },
          [&x](const RidgeModel& m) {
            if (x.size() != m.family.dim) throw Error(errc::kInvalidArgument, "evaluate_model: point dimension mismatch");
            double v = 0.0;
            for (const RidgeAtom& a : m.atoms) v += a.weight * corrected_ridge(m.family.m, x, a.offset, a.direction);
            if (m.poly.size() > 0) {
              const auto idx = multi_indices_up_to(m.family.dim, m.family.m - 1);
              if (static_cast<std::size_t>(m.poly.size()) != idx.size())
                throw Error(errc::kSchemaMismatch, "evaluate_model: polynomial coefficient count mismatch");
              for (std::size_t i = 0; i < idx.size(); ++i) v += m.poly[static_cast<Eigen::Index>(i)] * monomial(x, idx[i]);
            }
            return v;
          }},
      model);
}

Eigen::VectorXd evaluate_points(const Model& model, const Eigen::MatrixXd& points) {
  Eigen::VectorXd out(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) out[i] = evaluate_model(model, Eigen::VectorXd(points.row(i).transpose()));
  return out;
}

double mnorm_of_model(const Model& model, const Tolerances& tol) {
  return std::visit(
      Overloaded{[&tol](const SplineModel& m) { return mnorm_atomic(AtomicMeasure1D(m.atoms, m.family.period), tol); },
                 [&tol](const LizSplineModel& m) {
                   double total = 0.0;
                   for (std::size_t i = 0; i < m.atoms.size(); ++i) {
                     for (std::size_t j = 0; j < i; ++j)
                       if ((m.atoms[i].location - m.atoms[j].location).norm() <= tol.atom_gap)
                         throw Error(errc::kDuplicateAtoms, "mnorm_of_model: coincident atom locations");
                     total += std::abs(m.atoms[i].weight);
                   }
                   return total;
                 },
                 [&tol](const RidgeModel& m) {
                   double total = 0.0;
                   for (std::size_t i = 0; i < m.atoms.size(); ++i) {
                     for (std::size_t j = 0; j < i; ++j)
                       if (std::abs(m.atoms[i].offset - m.atoms[j].offset) <= tol.atom_gap &&
                           (m.atoms[i].direction - m.atoms[j].direction).norm() <= tol.atom_gap)
                         throw Error(errc::kDuplicateAtoms, "mnorm_of_model: coincident ridge atoms");
                     total += std::abs(m.atoms[i].weight);
                   }
                   return total;
                 }},
      model);
}

namespace detail {

const FracLaplaceKernel& cached_frac_kernel(double alpha, int dim) {
  thread_local std::map<std::pair<double, int>, std::unique_ptr<FracLaplaceKernel>> cache;
  auto& slot = cache[{alpha, dim}];
  if (!slot) slot = std::make_unique<FracLaplaceKernel>(alpha, dim);
  return *slot;
}

Eigen::VectorXd Dictionary::column(const Eigen::VectorXd& p) const {
  Eigen::VectorXd col(x_.rows());
  for (Eigen::Index m = 0; m < x_.rows(); ++m) col[m] = kernel(x_.row(m).transpose(), p);
  return col;
}

double golden_max(const std::function<double(double)>& f, double a, double b, int iterations, double& best_value) {
  constexpr double g = 0.6180339887498949;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < iterations && (b - a) > 1e-14 * std::max(1.0, std::abs(a)); ++it) {
    if (f1 > f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    }
  }
  best_value = std::max(f1, f2);
  return f1 > f2 ? x1 : x2;
}

void Dictionary::refine(Eigen::VectorXd& p, const Score& score) const {
  const int nf = free_params();
  const Eigen::VectorXd step = grid_step();
  double best = score(p);
  for (int cycle = 0; cycle < (nf == 1 ? 2 : 6); ++cycle) {
    const double before = best;
    for (int l = 0; l < nf; ++l) {
      auto at = [&](double v) {
        Eigen::VectorXd q = p;
        q[l] = v;
        normalize(q);
        return q;
      };
      double value = 0.0;
      const double v = golden_max([&](double t) { return score(at(t)); }, p[l] - step[l], p[l] + step[l], 60, value);
      if (value > best) {
        best = value;
        p = at(v);
      }
    }
    if (best <= before * (1.0 + 1e-15)) break;
  }
}

std::vector<int> Dictionary::sliding_coords(int /*anchor*/) const {
  std::vector<int> out(static_cast<std::size_t>(free_params()));
  for (int l = 0; l < free_params(); ++l) out[static_cast<std::size_t>(l)] = l;
  return out;
}

std::vector<double> Dictionary::jitter(int n) const {
  std::vector<double> out(n, 0.0);
  if (opt_.grid_jitter == 0.0) return out;
  std::mt19937_64 rng(opt_.seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (double& v : out) v = opt_.grid_jitter * u(rng);
  return out;
}

namespace {

class PeriodicDictionary final : public Dictionary {
 public:
  PeriodicDictionary(const PeriodicFamily& f, const Eigen::MatrixXd& x, const SolverOptions& opt)
      : Dictionary(x, opt), f_(f) {
    if (!(f.alpha > 1.0)) throw Error(errc::kAlphaTooSmall, "periodic family requires alpha > 1");
    if (!(f.period > 0.0)) throw Error(errc::kInvalidArgument, "periodic family requires a positive period");
    if (x.cols() != 1) throw Error(errc::kInvalidArgument, "periodic family takes scalar locations");
  }

  int param_size() const override { return 1; }

  double kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& p) const override {
    return green_periodic(f_.alpha, x[0] - p[0], f_.period, f_.order);
  }

  void normalize(Eigen::VectorXd& p) const override { p[0] = wrap(p[0], f_.period); }

  double distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) const override {
    const double d = wrap(p[0] - q[0], f_.period);
    return std::min(d, f_.period - d) / f_.period;
  }

  std::vector<Eigen::VectorXd> candidates(int refine) const override {
    const int n = opt_.periodic_grid * refine;
    const auto jit = jitter(n);
    std::vector<Eigen::VectorXd> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd p(1);
      p[0] = wrap((i + jit[i]) * f_.period / n, f_.period);
      out.push_back(p);
    }
    return out;
  }

  std::vector<std::vector<int>> neighbours(int refine) const override {
    const int n = opt_.periodic_grid * refine;
    std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = {(i + n - 1) % n, (i + 1) % n};
    return out;
  }

  Eigen::VectorXd grid_step() const override { return Eigen::VectorXd::Constant(1, f_.period / opt_.periodic_grid); }
  double grid_radius() const override { return 1.0 / opt_.periodic_grid; }
  Eigen::MatrixXd null_space() const override { return Eigen::MatrixXd::Ones(x_.rows(), 1); }

  Model make_model(const std::vector<double>& w, const std::vector<Eigen::VectorXd>& p,
                   const Eigen::VectorXd& c) const override {
    SplineModel m;
    m.family = f_;
    m.offset = c.size() > 0 ? c[0] : 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) m.atoms.push_back({w[k], wrap(p[k][0], f_.period)});
    return m;
  }

  void split_model(const Model& model, std::vector<double>& w, std::vector<Eigen::VectorXd>& p,
                   Eigen::VectorXd& c) const override {
    const auto& m = std::get<SplineModel>(model);
    w.clear();
    p.clear();
    for (const Atom1D& a : m.atoms) {
      w.push_back(a.weight);
      p.push_back(Eigen::VectorXd::Constant(1, a.location));
    }
    c = Eigen::VectorXd::Constant(1, m.offset);
  }

 private:
  PeriodicFamily f_;
};

class FracLapDictionary final : public Dictionary {
 public:
  FracLapDictionary(const FracLapFamily& f, const Eigen::MatrixXd& x, const SolverOptions& opt)
      : Dictionary(x, opt), f_(f), kern_(cached_frac_kernel(f.alpha, f.dim)) {
    if (x.cols() != f.dim) throw Error(errc::kInvalidArgument, "fraclap family: data dimension mismatch");
    if (!kern_.corrected_regime())
      throw Error(errc::kNotInValidRegime, "fraclap family requires alpha > d with alpha - d not an integer");
    lo_ = x.colwise().minCoeff().transpose();
    hi_ = x.colwise().maxCoeff().transpose();
    for (int i = 0; i < f.dim; ++i) {
      double span = hi_[i] - lo_[i];
      if (span <= 0.0) span = 1.0;
      lo_[i] -= 0.25 * span;
      hi_[i] += 0.25 * span;
    }
    diam_ = (hi_ - lo_).norm();
  }

  int param_size() const override { return f_.dim; }

  double kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& p) const override {
    return corrected_kernel_frac(kern_, Cutoff{}, x, p);
  }

  double distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) const override { return (p - q).norm() / diam_; }

  std::vector<Eigen::VectorXd> candidates(int refine) const override {
    const int n = per_axis() * refine;
    const auto jit = jitter(n * f_.dim);
    std::vector<Eigen::VectorXd> out;
    std::vector<int> idx(f_.dim, 0);
    while (true) {
      Eigen::VectorXd p(f_.dim);
      for (int i = 0; i < f_.dim; ++i)
        p[i] = lo_[i] + (idx[i] + jit[i * n + idx[i]]) * (hi_[i] - lo_[i]) / (n - 1);
      out.push_back(p);
      int i = 0;
      while (i < f_.dim && ++idx[i] == n) idx[i++] = 0;
      if (i == f_.dim) break;
    }
    return out;
  }

  std::vector<std::vector<int>> neighbours(int refine) const override {
    const int n = per_axis() * refine;
    int total = 1;
    for (int i = 0; i < f_.dim; ++i) total *= n;
    std::vector<std::vector<int>> out(static_cast<std::size_t>(total));
    for (int k = 0; k < total; ++k) {
      int stride = 1;
      for (int i = 0; i < f_.dim; ++i, stride *= n) {
        const int idx = (k / stride) % n;
        if (idx > 0) out[static_cast<std::size_t>(k)].push_back(k - stride);
        if (idx < n - 1) out[static_cast<std::size_t>(k)].push_back(k + stride);
      }
    }
    return out;
  }

  Eigen::VectorXd grid_step() const override { return (hi_ - lo_) / (per_axis() - 1); }
  double grid_radius() const override { return grid_step().minCoeff() / diam_; }
  Eigen::MatrixXd null_space() const override { return Eigen::MatrixXd(x_.rows(), 0); }

  Model make_model(const std::vector<double>& w, const std::vector<Eigen::VectorXd>& p,
                   const Eigen::VectorXd& /*c*/) const override {
    LizSplineModel m;
    m.family = f_;
    for (std::size_t k = 0; k < w.size(); ++k) m.atoms.push_back({w[k], p[k]});
    return m;
  }

  void split_model(const Model& model, std::vector<double>& w, std::vector<Eigen::VectorXd>& p,
                   Eigen::VectorXd& c) const override {
    const auto& m = std::get<LizSplineModel>(model);
    w.clear();
    p.clear();
    for (const PointAtom& a : m.atoms) {
      w.push_back(a.weight);
      p.push_back(a.location);
    }
    c.resize(0);
  }

 private:
  int per_axis() const {
    if (f_.dim == 1) return opt_.fraclap_grid_1d;
    if (f_.dim == 2) return opt_.fraclap_grid_2d;
    return std::max(4, opt_.fraclap_grid_2d / 4);
  }

  FracLapFamily f_;
  const FracLaplaceKernel& kern_;
  Eigen::VectorXd lo_, hi_;
  double diam_ = 1.0;
};

/// Ridge parameters: [t, s] with xi = s for d = 1, [t, theta] for d = 2, and
/// [t, xi_1..xi_d] (renormalized) for d >= 3.
class RidgeDictionary final : public Dictionary {
 public:
  RidgeDictionary(const RidgeFamily& f, const Eigen::MatrixXd& x, const SolverOptions& opt)
      : Dictionary(x, opt), f_(f) {
    if (f.m < 2) throw Error(errc::kInvalidArgument, "ridge family requires m >= 2");
    if (x.cols() != f.dim) throw Error(errc::kInvalidArgument, "ridge family: data dimension mismatch");
    radius_ = x.rows() > 0 ? x.rowwise().norm().maxCoeff() : 1.0;
    t_lo_ = -std::max(radius_, 1.0) - 0.1;
    t_hi_ = radius_ + 0.1;
    scale_ = std::max(radius_, 1.0);
    if (f.polynomial) indices_ = multi_indices_up_to(f.dim, f.m - 1);
  }

  int param_size() const override { return f_.dim == 2 ? 2 : 1 + f_.dim; }
  int free_params() const override { return f_.dim == 1 ? 1 : param_size(); }

  Eigen::VectorXd direction(const Eigen::VectorXd& p) const {
    if (f_.dim == 2) return Eigen::Vector2d(std::cos(p[1]), std::sin(p[1]));
    return p.tail(f_.dim);
  }

  double kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& p) const override {
    const double s = x.dot(direction(p)) - p[0];
    const double ramp = ridge_profile(f_.m, s);
    const double w = ridge_correction_weight(p[0]);
    if (w == 0.0) return ramp;
    double poly = 1.0;
    for (int k = 1; k < f_.m; ++k) poly *= s / k;
    return ramp - w * poly;
  }

  void normalize(Eigen::VectorXd& p) const override {
    if (f_.dim == 2) {
      p[1] = wrap(p[1], 2.0 * kPi);
    } else if (f_.dim >= 3) {
      const double n = p.tail(f_.dim).norm();
      if (n > 0.0) p.tail(f_.dim) /= n;
    }
  }

  double distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) const override {
    return std::abs(p[0] - q[0]) / scale_ + angle_between(direction(p), direction(q));
  }

  std::vector<Eigen::VectorXd> candidates(int refine) const override {
    const int nt = opt_.ridge_offsets * refine;
    const auto jit = jitter(nt);
    std::vector<Eigen::VectorXd> dirs = directions(refine);
    std::vector<Eigen::VectorXd> out;
    out.reserve(dirs.size() * nt);
    for (const Eigen::VectorXd& d : dirs) {
      for (int i = 0; i < nt; ++i) {
        Eigen::VectorXd p = d;
        p[0] = t_lo_ + (i + jit[i]) * (t_hi_ - t_lo_) / (nt - 1);
        out.push_back(p);
      }
      // the certificate peaks on kinks, which a uniform offset grid straddles
      for (double k : kinks(d)) {
        if (k < t_lo_ || k > t_hi_) continue;
        Eigen::VectorXd p = d;
        p[0] = k;
        out.push_back(p);
      }
    }
    return out;
  }

  std::vector<std::vector<int>> neighbours(int refine) const override {
    const int nt = opt_.ridge_offsets * refine;
    const std::vector<Eigen::VectorXd> dirs = directions(refine);
    const int nd = static_cast<int>(dirs.size());
    // block layout as in candidates(): nt uniform offsets, then the in-range kinks
    std::vector<int> start(static_cast<std::size_t>(nd) + 1, 0);
    std::vector<std::vector<double>> kink_t(static_cast<std::size_t>(nd));
    for (int k = 0; k < nd; ++k) {
      for (double t : kinks(dirs[static_cast<std::size_t>(k)]))
        if (t >= t_lo_ && t <= t_hi_) kink_t[static_cast<std::size_t>(k)].push_back(t);
      start[static_cast<std::size_t>(k) + 1] =
          start[static_cast<std::size_t>(k)] + nt + static_cast<int>(kink_t[static_cast<std::size_t>(k)].size());
    }
    std::vector<std::vector<int>> out(static_cast<std::size_t>(start.back()));
    auto link = [&out](int a, int b) {
      out[static_cast<std::size_t>(a)].push_back(b);
      out[static_cast<std::size_t>(b)].push_back(a);
    };
    const double dt = (t_hi_ - t_lo_) / (nt - 1);
    for (int k = 0; k < nd; ++k) {
      const int s0 = start[static_cast<std::size_t>(k)];
      for (int i = 0; i + 1 < nt; ++i) link(s0 + i, s0 + i + 1);
      const auto& kt = kink_t[static_cast<std::size_t>(k)];
      for (std::size_t j = 0; j < kt.size(); ++j) {
        const int i = std::clamp(static_cast<int>(std::floor((kt[j] - t_lo_) / dt)), 0, nt - 2);
        link(s0 + nt + static_cast<int>(j), s0 + i);
        link(s0 + nt + static_cast<int>(j), s0 + i + 1);
      }
    }
    // adjacent directions share offset indices
    std::vector<std::pair<int, int>> pairs;
    if (f_.dim == 2) {
      for (int k = 0; k < nd; ++k) pairs.push_back({k, (k + 1) % nd});
    } else if (f_.dim >= 3) {
      for (int a = 0; a < nd; ++a) {
        std::vector<std::pair<double, int>> by_angle;
        for (int b = 0; b < nd; ++b)
          if (b != a)
            by_angle.push_back({angle_between(direction(dirs[static_cast<std::size_t>(a)]), direction(dirs[static_cast<std::size_t>(b)])), b});
        const std::size_t nn = std::min<std::size_t>(6, by_angle.size());
        std::partial_sort(by_angle.begin(), by_angle.begin() + static_cast<std::ptrdiff_t>(nn), by_angle.end());
        for (std::size_t j = 0; j < nn; ++j)
          if (a < by_angle[j].second) pairs.push_back({a, by_angle[j].second});
      }
    }
    for (const auto& [a, b] : pairs)
      for (int i = 0; i < nt; ++i) link(start[static_cast<std::size_t>(a)] + i, start[static_cast<std::size_t>(b)] + i);
    for (auto& v : out) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return out;
  }

  Eigen::VectorXd grid_step() const override {
    Eigen::VectorXd step(free_params());
    step[0] = (t_hi_ - t_lo_) / (opt_.ridge_offsets - 1);
    if (f_.dim == 2) step[1] = 2.0 * kPi / opt_.ridge_directions;
    if (f_.dim >= 3) step.tail(f_.dim).setConstant(std::sqrt(4.0 * kPi / opt_.ridge_directions));
    return step;
  }

  double grid_radius() const override {
    const Eigen::VectorXd step = grid_step();
    double r = step[0] / scale_;
    if (f_.dim >= 2) r = std::min(r, step[1]);
    return r;
  }

  /// Offsets where the kernel has a kink in t for the direction of p: the
  /// data projections (m = 2 only) followed by t = 0 and t = -1.
  std::vector<double> kinks(const Eigen::VectorXd& p) const {
    std::vector<double> out;
    if (f_.m == 2) {
      const Eigen::VectorXd xi = direction(p);
      for (Eigen::Index m = 0; m < x_.rows(); ++m) out.push_back(x_.row(m).dot(xi));
    }
    out.push_back(0.0);
    out.push_back(-1.0);
    return out;
  }

  int anchor(const Eigen::VectorXd& p) const override {
    const std::vector<double> k = kinks(p);
    for (std::size_t i = 0; i < k.size(); ++i)
      if (std::abs(p[0] - k[i]) <= 1e-9 * scale_) return static_cast<int>(i);
    return -1;
  }

  std::vector<int> sliding_coords(int anchor) const override {
    std::vector<int> out = Dictionary::sliding_coords(anchor);
    if (anchor >= 0) out.erase(out.begin());
    return out;
  }

  void snap(Eigen::VectorXd& p, int anchor) const override {
    normalize(p);
    if (anchor >= 0) p[0] = kinks(p)[static_cast<std::size_t>(anchor)];
  }

  /// Planar search over theta with t re-maximized at each trial direction over
  /// the kinks and the smooth pieces between them near the current offset.
  void refine(Eigen::VectorXd& p, const Score& score) const override {
    if (f_.dim != 2) {
      Dictionary::refine(p, score);
      return;
    }
    const Eigen::VectorXd step = grid_step();
    auto best_offset = [&](Eigen::VectorXd q, double center, double& value) {
      const double lo = std::max(t_lo_, center - 2.0 * step[0]);
      const double hi = std::min(t_hi_, center + 2.0 * step[0]);
      std::vector<double> cuts{lo, hi};
      for (double k : kinks(q))
        if (k > lo && k < hi) cuts.push_back(k);
      std::sort(cuts.begin(), cuts.end());
      double best_t = center;
      value = -1.0;
      auto eval = [&](double t) {
        q[0] = t;
        return score(q);
      };
      for (std::size_t i = 0; i < cuts.size(); ++i) {
        const double v = eval(cuts[i]);
        if (v > value) {
          value = v;
          best_t = cuts[i];
        }
        if (i + 1 < cuts.size() && cuts[i + 1] > cuts[i]) {
          double vi = 0.0;
          const double ti = golden_max(eval, cuts[i], cuts[i + 1], 50, vi);
          if (vi > value) {
            value = vi;
            best_t = ti;
          }
        }
      }
      return best_t;
    };
    double best = score(p);
    for (int cycle = 0; cycle < 8; ++cycle) {
      const double before = best;
      double value = 0.0;
      const double t_here = best_offset(p, p[0], value);
      if (value > best) {
        best = value;
        p[0] = t_here;
      }
      const double center = p[0];
      const int followed = anchor(p);
      // offset at theta: the followed kink, or the best point near the current offset
      auto offset_at = [&](Eigen::VectorXd q, double& v) {
        double t = best_offset(q, center, v);
        if (followed >= 0) {
          q[0] = kinks(q)[static_cast<std::size_t>(followed)];
          const double vk = score(q);
          if (vk > v) {
            v = vk;
            t = q[0];
          }
        }
        return t;
      };
      auto profile = [&](double theta) {
        Eigen::VectorXd q = p;
        q[1] = theta;
        double v = 0.0;
        offset_at(q, v);
        return v;
      };
      double vt = 0.0;
      const double theta = golden_max(profile, p[1] - step[1], p[1] + step[1], 50, vt);
      if (vt > best) {
        Eigen::VectorXd q = p;
        q[1] = theta;
        double v = 0.0;
        q[0] = offset_at(q, v);
        normalize(q);
        if (v > best) {
          best = v;
          p = q;
        }
      }
      if (best <= before * (1.0 + 1e-15)) break;
    }
  }

  Eigen::MatrixXd null_space() const override {
    Eigen::MatrixXd n(x_.rows(), static_cast<Eigen::Index>(indices_.size()));
    for (Eigen::Index m = 0; m < x_.rows(); ++m)
      for (std::size_t i = 0; i < indices_.size(); ++i)
        n(m, static_cast<Eigen::Index>(i)) = monomial(x_.row(m).transpose(), indices_[i]);
    return n;
  }

  Model make_model(const std::vector<double>& w, const std::vector<Eigen::VectorXd>& p,
                   const Eigen::VectorXd& c) const override {
    RidgeModel m;
    m.family = f_;
    for (std::size_t k = 0; k < w.size(); ++k) m.atoms.push_back({w[k], p[k][0], direction(p[k])});
    if (f_.polynomial) m.poly = c;
    return m;
  }

  void split_model(const Model& model, std::vector<double>& w, std::vector<Eigen::VectorXd>& p,
                   Eigen::VectorXd& c) const override {
    const auto& m = std::get<RidgeModel>(model);
    w.clear();
    p.clear();
    for (const RidgeAtom& a : m.atoms) {
      w.push_back(a.weight);
      Eigen::VectorXd q(param_size());
      q[0] = a.offset;
      if (f_.dim == 2)
        q[1] = wrap(std::atan2(a.direction[1], a.direction[0]), 2.0 * kPi);
      else
        q.tail(f_.dim) = a.direction;
      p.push_back(q);
    }
    c = f_.polynomial ? m.poly : Eigen::VectorXd(0);
    if (f_.polynomial && c.size() != static_cast<Eigen::Index>(indices_.size())) c = Eigen::VectorXd::Zero(indices_.size());
  }

 private:
  /// Direction part of the candidate parameters (t left at zero).
  std::vector<Eigen::VectorXd> directions(int refine) const {
    std::vector<Eigen::VectorXd> out;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(param_size());
    if (f_.dim == 1) {
      for (double s : {1.0, -1.0}) {
        p[1] = s;
        out.push_back(p);
      }
      return out;
    }
    const int n = opt_.ridge_directions * refine;
    if (f_.dim == 2) {
      for (int k = 0; k < n; ++k) {
        p[1] = 2.0 * kPi * k / n;
        out.push_back(p);
      }
      return out;
    }
    // Fibonacci lattice on S^2, lifted to higher d by padding with zeros.
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < n; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / n;
      const double r = std::sqrt(1.0 - z * z);
      p.tail(f_.dim).setZero();
      p[1] = r * std::cos(golden * k);
      p[2] = r * std::sin(golden * k);
      p[3] = z;
      out.push_back(p);
    }
    return out;
  }

  RidgeFamily f_;
  double radius_ = 1.0;
  double t_lo_ = -1.0, t_hi_ = 1.0, scale_ = 1.0;
  std::vector<MultiIndex> indices_;
};

}  // namespace

std::unique_ptr<Dictionary> make_dictionary(const Family& family, const Eigen::MatrixXd& x, const SolverOptions& opt) {
  return std::visit(
      Overloaded{[&](const PeriodicFamily& f) -> std::unique_ptr<Dictionary> {
                   return std::make_unique<PeriodicDictionary>(f, x, opt);
                 },
                 [&](const FracLapFamily& f) -> std::unique_ptr<Dictionary> {
                   return std::make_unique<FracLapDictionary>(f, x, opt);
                 },
                 [&](const RidgeFamily& f) -> std::unique_ptr<Dictionary> {
                   if (f.dim < 1) throw Error(errc::kInvalidArgument, "ridge family requires d >= 1");
                   return std::make_unique<RidgeDictionary>(f, x, opt);
                 }},
      family);
}

}  // namespace detail

}  // namespace lizkit
