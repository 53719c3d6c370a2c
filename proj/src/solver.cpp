#include "lizkit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "families.hpp"
#include "lizkit/errors.hpp"
#include "lizkit/radon.hpp"

namespace lizkit {

namespace {

using detail::Dictionary;

double soft_threshold(double v, double tau) {
  if (v > tau) return v - tau;
  if (v < -tau) return v + tau;
  return 0.0;
}

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

/// Working set of the exchange method.
struct State {
  std::vector<Eigen::VectorXd> params;
  Eigen::MatrixXd K;  // M x n kernel columns
  Eigen::VectorXd w;
  Eigen::VectorXd c;  // null-space coefficients

  int size() const { return static_cast<int>(params.size()); }
};

class ExchangeSolver {
 public:
  ExchangeSolver(const FitProblem& problem, const SolverOptions& opt)
      : problem_(problem), opt_(opt), dict_(detail::make_dictionary(problem.family, problem.x, opt)) {
    N_ = dict_->null_space();
    y_ = problem.y;
    if (N_.cols() > 0) {
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(N_);
      const Eigen::Index rank = qr.rank();
      Eigen::MatrixXd full = qr.householderQ();
      Q_ = full.leftCols(rank);
      n_solver_ = qr;
      // iterate on data with its null-space least-squares part removed
      c0_ = n_solver_.solve(y_);
      y_ -= N_ * c0_;
    } else {
      Q_ = Eigen::MatrixXd(y_.size(), 0);
    }
    candidates_ = dict_->candidates(1);
    neighbours_ = dict_->neighbours(1);
    cand_matrix_.resize(static_cast<Eigen::Index>(candidates_.size()), y_.size());
    for (std::size_t i = 0; i < candidates_.size(); ++i)
      cand_matrix_.row(static_cast<Eigen::Index>(i)) = dict_->column(candidates_[i]).transpose();
    step_ = dict_->grid_step();
  }

  const Dictionary& dictionary() const { return *dict_; }

  State initial_state() const {
    State s;
    s.K = Eigen::MatrixXd(y_.size(), 0);
    s.w = Eigen::VectorXd(0);
    s.c = solve_null(y_);
    return s;
  }

  Model to_model(const State& s) const {
    std::vector<double> w(s.w.data(), s.w.data() + s.w.size());
    return dict_->make_model(w, s.params, c0_.size() > 0 ? Eigen::VectorXd(s.c + c0_) : s.c);
  }

  Eigen::VectorXd fitted(const State& s) const {
    Eigen::VectorXd z = s.K * s.w;
    if (N_.cols() > 0) z += N_ * s.c;
    return z;
  }

  double primal(const State& s, double lambda) const {
    const Eigen::VectorXd r = y_ - fitted(s);
    double e = 0.0;
    for (Eigen::Index m = 0; m < r.size(); ++m) e += problem_.loss.value(r[m]);
    return e + lambda * s.w.lpNorm<1>();
  }

  Eigen::VectorXd influence(const Eigen::VectorXd& r) const {
    Eigen::VectorXd u(r.size());
    for (Eigen::Index m = 0; m < r.size(); ++m) u[m] = problem_.loss.influence(r[m]);
    return u;
  }

  Eigen::VectorXd project_out_null(const Eigen::VectorXd& v) const {
    if (Q_.cols() == 0) return v;
    return v - Q_ * (Q_.transpose() * v);
  }

  /// Dual value of the scaled, null-space-projected influence vector.
  double dual(const Eigen::VectorXd& u_raw, double cert_max, double lambda) const {
    Eigen::VectorXd u = project_out_null(u_raw);
    double s = cert_max > lambda ? lambda / cert_max : 1.0;
    if (problem_.loss.kind == Loss::Kind::huber) {
      const double peak = u.cwiseAbs().maxCoeff();
      if (peak > problem_.loss.delta) s = std::min(s, problem_.loss.delta / peak);
    }
    return s * u.dot(y_) - 0.5 * s * s * u.squaredNorm();
  }

  // ---- weight solve -------------------------------------------------------

  void solve_weights(State& s, double lambda) const {
    if (s.size() == 0) {
      s.c = solve_null(y_);
      return;
    }
    if (problem_.loss.kind == Loss::Kind::quadratic) {
      const Eigen::MatrixXd Kt = projected_columns(s.K);
      const Eigen::VectorXd yt = project_out_null(y_);
      coordinate_descent_lasso(Kt, yt, lambda, s.w, 200);
      feature_sign_polish(Kt, yt, lambda, s.w);
      s.c = solve_null(y_ - s.K * s.w);
    } else {
      // Huber(r) = min_z (r - z)^2 / 2 + delta |z|: a LASSO over [K, (lambda / delta) I]
      const Eigen::Index n = s.w.size(), M = y_.size();
      const double scale = lambda / problem_.loss.delta;
      Eigen::MatrixXd A(M, n + M);
      A.leftCols(n) = projected_columns(s.K);
      A.rightCols(M) = projected_columns(scale * Eigen::MatrixXd::Identity(M, M));
      const Eigen::VectorXd r = y_ - fitted(s);
      Eigen::VectorXd v(n + M);
      v.head(n) = s.w;
      for (Eigen::Index m = 0; m < M; ++m) v[n + m] = (r[m] - problem_.loss.influence(r[m])) / scale;
      const Eigen::VectorXd yt = project_out_null(y_);
      coordinate_descent_lasso(A, yt, lambda, v, 200);
      feature_sign_polish(A, yt, lambda, v);
      s.w = v.head(n);
      s.c = solve_null(y_ - s.K * s.w - scale * v.tail(M));
    }
  }

  // ---- certificate ----------------------------------------------------------

  double eta(const Eigen::VectorXd& p, const Eigen::VectorXd& u) const { return dict_->column(p).dot(u); }

  struct Peak {
    Eigen::VectorXd param;
    double value;  // signed eta
  };

  /// Discrete local maxima of |eta| on the candidate grid within 10% of the
  /// largest, plus maxima found from the seeds, all refined locally.
  std::vector<Peak> certificate_peaks(const Eigen::VectorXd& u, int count,
                                      const std::vector<Eigen::VectorXd>& seeds = {}) const {
    const Eigen::VectorXd e = cand_matrix_ * u;
    std::vector<Eigen::Index> order;
    for (Eigen::Index i = 0; i < e.size(); ++i) {
      const double v = std::abs(e[i]);
      bool top = true;
      for (int j : neighbours_[static_cast<std::size_t>(i)]) {
        const double w = std::abs(e[j]);
        top = top && (v > w || (v == w && i < j));
      }
      if (top) order.push_back(i);
    }
    const int limit = std::max(count, 2 * static_cast<int>(y_.size()) + 8);
    const std::size_t keep = std::min<std::size_t>(order.size(), static_cast<std::size_t>(limit));
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                      [&e](Eigen::Index a, Eigen::Index b) {
                        const double da = std::abs(e[a]), db = std::abs(e[b]);
                        return da != db ? da > db : a < b;
                      });
    std::vector<Peak> peaks;
    const double floor = keep > 0 ? 0.9 * std::abs(e[order[0]]) : 0.0;
    for (std::size_t i = 0; i < keep; ++i) {
      if (static_cast<int>(peaks.size()) >= count && std::abs(e[order[i]]) < floor) break;
      peaks.push_back({candidates_[static_cast<std::size_t>(order[i])], e[order[i]]});
    }
    for (const Eigen::VectorXd& p : seeds) peaks.push_back({p, 0.0});
    for (Peak& pk : peaks) refine_peak(pk, u);
    std::stable_sort(peaks.begin(), peaks.end(),
                     [](const Peak& a, const Peak& b) { return std::abs(a.value) > std::abs(b.value); });
    return peaks;
  }

  void refine_peak(Peak& pk, const Eigen::VectorXd& u) const {
    dict_->refine(pk.param, [&](const Eigen::VectorXd& p) { return std::abs(eta(p, u)); });
    pk.value = eta(pk.param, u);
  }

  // ---- joint refinement -----------------------------------------------------

  /// Levenberg-Marquardt on weights, free atom parameters and null-space
  /// coefficients with the weight signs held fixed.
  void slide(State& s, double lambda) const {
    const int n = s.size();
    if (n == 0) return;
    const int q = static_cast<int>(N_.cols());
    std::vector<int> anchors(static_cast<std::size_t>(n));
    std::vector<std::vector<int>> coords(static_cast<std::size_t>(n));
    std::vector<int> offset(static_cast<std::size_t>(n));
    int P = n;
    for (int j = 0; j < n; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      anchors[ju] = dict_->anchor(s.params[ju]);
      coords[ju] = dict_->sliding_coords(anchors[ju]);
      offset[ju] = P;
      P += static_cast<int>(coords[ju].size());
    }
    P += q;
    const Eigen::VectorXd sgn = s.w.unaryExpr([](double v) { return sign_of(v); });
    const Eigen::VectorXd fd_step = step_ * 1e-5;

    double f = primal(s, lambda);
    double mu = 1e-3;
    for (int it = 0; it < 40; ++it) {
      const Eigen::VectorXd r = y_ - fitted(s);
      const Eigen::VectorXd u = influence(r);
      Eigen::MatrixXd J(y_.size(), P);
      Eigen::VectorXd curvature = Eigen::VectorXd::Ones(y_.size());
      if (problem_.loss.kind == Loss::Kind::huber)
        for (Eigen::Index m = 0; m < r.size(); ++m) curvature[m] = std::abs(r[m]) <= problem_.loss.delta ? 1.0 : 1e-6;
      for (int j = 0; j < n; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        J.col(j) = s.K.col(j);
        for (std::size_t i = 0; i < coords[ju].size(); ++i) {
          const int l = coords[ju][i];
          Eigen::VectorXd pp = s.params[ju], pm = pp;
          pp[l] += fd_step[l];
          pm[l] -= fd_step[l];
          dict_->snap(pp, anchors[ju]);
          dict_->snap(pm, anchors[ju]);
          J.col(offset[ju] + static_cast<int>(i)) = s.w[j] * (dict_->column(pp) - dict_->column(pm)) / (2.0 * fd_step[l]);
        }
      }
      if (q > 0) J.rightCols(q) = N_;
      Eigen::VectorXd g = -J.transpose() * u;
      g.head(n) += lambda * sgn;
      const Eigen::MatrixXd H = J.transpose() * curvature.asDiagonal() * J;
      if (g.norm() <= 1e-15 * (1.0 + std::abs(f))) break;

      bool accepted = false;
      while (mu < 1e12) {
        Eigen::MatrixXd A = H;
        A.diagonal() += mu * (H.diagonal().array() + 1e-12).matrix();
        const Eigen::VectorXd delta = A.ldlt().solve(-g);
        State trial = s;
        trial.w += delta.head(n);
        bool flipped = !delta.allFinite();
        for (int j = 0; j < n && !flipped; ++j) flipped = sign_of(trial.w[j]) != sgn[j];
        if (!flipped) {
          for (int j = 0; j < n; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            Eigen::VectorXd& p = trial.params[ju];
            for (std::size_t i = 0; i < coords[ju].size(); ++i) p[coords[ju][i]] += delta[offset[ju] + static_cast<int>(i)];
            dict_->snap(p, anchors[ju]);
            trial.K.col(j) = dict_->column(p);
          }
          if (q > 0) trial.c += delta.tail(q);
          const double ft = primal(trial, lambda);
          if (ft < f) {
            const double gain = f - ft;
            s = std::move(trial);
            f = ft;
            mu = std::max(mu / 4.0, 1e-12);
            accepted = true;
            if (gain <= 1e-15 * std::abs(f)) mu = 1e12;
            break;
          }
        }
        mu *= 4.0;
      }
      if (!accepted || mu >= 1e12) break;
    }
  }

  /// Moves every atom to the local maximizer of sign(w) eta; kept only when
  /// the re-solved objective decreases.
  bool polish_positions(State& s, double lambda, const std::function<void(State&)>& resolve) const {
    if (s.size() == 0) return false;
    const Eigen::VectorXd u = project_out_null(influence(y_ - fitted(s)));
    State trial = s;
    bool moved = false;
    for (int j = 0; j < s.size(); ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const double sg = sign_of(s.w[j]);
      Eigen::VectorXd p = s.params[ju];
      const double before = sg * eta(p, u);
      dict_->refine(p, [&](const Eigen::VectorXd& q) { return sg * eta(q, u); });
      if (sg * eta(p, u) > before + 1e-12 * std::abs(before)) {
        trial.params[ju] = p;
        trial.K.col(j) = dict_->column(p);
        moved = true;
      }
    }
    if (!moved) return false;
    const double f0 = primal(s, lambda);
    resolve(trial);
    if (primal(trial, lambda) < f0) {
      s = std::move(trial);
      return true;
    }
    return false;
  }

  // ---- pruning and merging ---------------------------------------------------

  void prune(State& s) const {
    std::vector<int> keep;
    for (int j = 0; j < s.size(); ++j)
      if (s.w[j] != 0.0) keep.push_back(j);
    select(s, keep);
  }

  /// Merges atoms closer than merge_tol; returns whether anything changed.
  bool merge(State& s) const {
    bool changed = false;
    for (int i = 0; i < s.size(); ++i) {
      for (int j = i + 1; j < s.size(); ++j) {
        if (dict_->distance(s.params[static_cast<std::size_t>(i)], s.params[static_cast<std::size_t>(j)]) >= opt_.merge_tol)
          continue;
        if (std::abs(s.w[j]) > std::abs(s.w[i])) {
          s.params[static_cast<std::size_t>(i)] = s.params[static_cast<std::size_t>(j)];
          s.K.col(i) = s.K.col(j);
        }
        s.w[i] += s.w[j];
        s.w[j] = 0.0;
        changed = true;
      }
    }
    if (changed) prune(s);
    return changed;
  }

  /// Caratheodory reduction: moves along null vectors of the projected columns
  /// (fitted values unchanged, l1 norm non-increasing) until the columns are
  /// linearly independent and at most `bound` atoms remain.
  void reduce_support(State& s, int bound) const {
    while (s.size() > 0) {
      const Eigen::MatrixXd Kt = projected_columns(s.K);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(Kt, Eigen::ComputeFullV);
      const Eigen::VectorXd& sv = svd.singularValues();
      const bool deficient = s.size() > Kt.rows() || sv[sv.size() - 1] <= 1e-8 * sv[0];
      if (s.size() <= bound && !deficient) break;
      Eigen::VectorXd v = svd.matrixV().col(s.size() - 1);
      const Eigen::VectorXd sgn = s.w.unaryExpr([](double x) { return sign_of(x); });
      if (sgn.dot(v) > 0.0) v = -v;
      auto first_hit = [&](const Eigen::VectorXd& dir, double& tstar) {
        int hit = -1;
        tstar = std::numeric_limits<double>::infinity();
        for (int j = 0; j < s.size(); ++j) {
          if (dir[j] == 0.0 || sign_of(dir[j]) == sgn[j]) continue;
          const double tj = -s.w[j] / dir[j];
          if (tj < tstar) {
            tstar = tj;
            hit = j;
          }
        }
        return hit;
      };
      double tstar = 0.0;
      int hit = first_hit(v, tstar);
      if (hit < 0) {
        v = -v;
        hit = first_hit(v, tstar);
      }
      if (hit < 0) break;
      s.w += tstar * v;
      s.w[hit] = 0.0;
      prune(s);
      s.c = solve_null(y_ - s.K * s.w);
    }
  }

  // ---- one value of lambda ---------------------------------------------------

  struct StageResult {
    bool converged = false;
    double objective = 0.0;
    double dual = 0.0;
    double cert = 0.0;
  };

  StageResult solve_at(State& s, double lambda, std::vector<IterationRecord>& trace, int& iter_counter) const {
    StageResult out;
    const int bound = atom_bound(problem_.family, static_cast<int>(y_.size()));
    const std::function<void(State&)> resolve_state = [&](State& st) {
      solve_weights(st, lambda);
      prune(st);
      const int before = st.size();
      reduce_support(st, bound);
      if (st.size() < before) {
        solve_weights(st, lambda);
        prune(st);
      }
    };
    auto resolve = [&] { resolve_state(s); };
    double last_objective = std::numeric_limits<double>::infinity();
    int stalled = 0;
    for (int it = 0; it < opt_.max_iter; ++it) {
      resolve();
      if (opt_.sliding && s.size() > 0) {
        slide(s, lambda);
        resolve();
        polish_positions(s, lambda, resolve_state);
      }
      if (merge(s)) resolve();

      const Eigen::VectorXd u = influence(y_ - fitted(s));
      const std::vector<Peak> peaks = certificate_peaks(project_out_null(u), opt_.refine_candidates, s.params);
      out.cert = peaks.empty() ? 0.0 : std::abs(peaks.front().value);
      out.objective = primal(s, lambda);
      out.dual = dual(u, out.cert, lambda);
      const double gap = (out.objective - out.dual) / std::max(std::abs(out.objective), 1e-300);
      trace.push_back({iter_counter++, out.objective, gap, s.size()});

      if (out.cert <= lambda * (1.0 + opt_.rel_gap) || gap <= opt_.rel_gap) {
        out.converged = true;
        break;
      }
      stalled = out.objective < last_objective * (1.0 - 1e-14) ? 0 : stalled + 1;
      last_objective = std::min(last_objective, out.objective);
      if (stalled >= 10) break;
      bool inserted = false;
      for (const Peak& pk : peaks) {
        if (std::abs(pk.value) <= lambda * (1.0 + opt_.rel_gap)) break;
        bool dup = false;
        for (const auto& p : s.params) dup = dup || dict_->distance(p, pk.param) < opt_.merge_tol;
        if (dup) continue;
        add_atom(s, pk.param);
        inserted = true;
        break;
      }
      if (!inserted) {
        // The only violating peaks coincide with active atoms: nothing left to add.
        out.converged = out.cert <= lambda * (1.0 + 10.0 * opt_.rel_gap);
        break;
      }
    }
    if (s.size() > bound) {
      reduce_support(s, bound);
      out.objective = primal(s, lambda);
    }
    return out;
  }

  FitResult run() const {
    FitResult result;
    std::vector<IterationRecord> trace;
    int iter_counter = 0;
    State s = initial_state();

    if (!problem_.interpolate) {
      const StageResult st = solve_at(s, problem_.lambda, trace, iter_counter);
      result.status = st.converged ? FitStatus::converged : FitStatus::not_converged;
      finish(result, s, problem_.lambda, st);
    } else {
      const Eigen::VectorXd u0 = project_out_null(influence(y_ - fitted(s)));
      const std::vector<Peak> p0 = certificate_peaks(u0, 1);
      double lambda = p0.empty() ? 0.0 : 0.5 * std::abs(p0.front().value);
      StageResult st;
      bool feasible = false;
      if (!(lambda > 0.0)) {
        feasible = (y_ - fitted(s)).cwiseAbs().maxCoeff() <= opt_.interp_tol;
        lambda = std::max(problem_.lambda, std::numeric_limits<double>::min());
        st.converged = true;
        st.objective = primal(s, lambda);
        st.dual = st.objective;
      }
      for (int k = 0; k < opt_.max_continuation && !feasible; ++k) {
        st = solve_at(s, lambda, trace, iter_counter);
        const double peak = s.size() + y_.size() > 0 ? (y_ - fitted(s)).cwiseAbs().maxCoeff() : 0.0;
        if (peak <= opt_.interp_tol) {
          feasible = true;
          break;
        }
        lambda *= 0.5;
      }
      if (!feasible)
        result.status = FitStatus::infeasible_interpolation;
      else
        result.status = st.converged ? FitStatus::converged : FitStatus::not_converged;
      finish(result, s, lambda, st);
    }
    result.trace = std::move(trace);
    return result;
  }

  double certificate_sup_on(const Model& model, int refine) const {
    const Eigen::VectorXd u = project_out_null(influence(problem_.y - evaluate_points(model, problem_.x)));
    double best = 0.0;
    for (const Eigen::VectorXd& p : dict_->candidates(refine)) best = std::max(best, std::abs(eta(p, u)));
    return best;
  }

 private:
  void finish(FitResult& result, const State& s, double lambda, const StageResult& st) const {
    result.model = to_model(s);
    result.lambda = lambda;
    result.fitted = evaluate_points(result.model, problem_.x);
    result.residuals = problem_.y - result.fitted;
    double e = 0.0;
    for (Eigen::Index m = 0; m < result.residuals.size(); ++m) e += problem_.loss.value(result.residuals[m]);
    result.objective = e + lambda * s.w.lpNorm<1>();
    result.lower_bound = st.dual;
    result.max_certificate = st.cert;
  }

  void add_atom(State& s, const Eigen::VectorXd& p) const {
    s.params.push_back(p);
    s.K.conservativeResize(Eigen::NoChange, s.K.cols() + 1);
    s.K.col(s.K.cols() - 1) = dict_->column(p);
    s.w.conservativeResize(s.w.size() + 1);
    s.w[s.w.size() - 1] = 0.0;
  }

  void select(State& s, const std::vector<int>& keep) const {
    if (static_cast<int>(keep.size()) == s.size()) return;
    State t;
    t.c = s.c;
    t.K.resize(s.K.rows(), static_cast<Eigen::Index>(keep.size()));
    t.w.resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) {
      t.params.push_back(s.params[static_cast<std::size_t>(keep[i])]);
      t.K.col(static_cast<Eigen::Index>(i)) = s.K.col(keep[i]);
      t.w[static_cast<Eigen::Index>(i)] = s.w[keep[i]];
    }
    s = std::move(t);
  }

  void rebuild_columns(State& s) const {
    s.K.resize(y_.size(), s.size());
    for (int j = 0; j < s.size(); ++j) s.K.col(j) = dict_->column(s.params[static_cast<std::size_t>(j)]);
  }

  Eigen::VectorXd solve_null(const Eigen::VectorXd& target) const {
    if (N_.cols() == 0) return Eigen::VectorXd(0);
    return n_solver_.solve(target);
  }

  Eigen::MatrixXd projected_columns(const Eigen::MatrixXd& K) const {
    if (Q_.cols() == 0) return K;
    return K - Q_ * (Q_.transpose() * K);
  }

  static void coordinate_descent_lasso(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double lambda,
                                       Eigen::VectorXd& w, int max_sweeps) {
    const Eigen::VectorXd L = A.colwise().squaredNorm().transpose();
    Eigen::VectorXd r = b - A * w;
    const double scale = std::max(b.norm(), 1e-300);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      double change = 0.0;
      for (Eigen::Index j = 0; j < w.size(); ++j) {
        if (L[j] == 0.0) {
          w[j] = 0.0;
          continue;
        }
        const double old = w[j];
        const double nw = soft_threshold(old + A.col(j).dot(r) / L[j], lambda / L[j]);
        if (nw != old) {
          r -= (nw - old) * A.col(j);
          w[j] = nw;
          change = std::max(change, std::abs(nw - old) * std::sqrt(L[j]));
        }
      }
      if (change <= 1e-14 * scale) break;
    }
  }

  /// Exact active-set solution of the LASSO from a warm start (feature-sign search).
  static void feature_sign_polish(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double lambda, Eigen::VectorXd& w) {
    const Eigen::Index n = w.size();
    auto objective = [&](const Eigen::VectorXd& v) { return 0.5 * (b - A * v).squaredNorm() + lambda * v.lpNorm<1>(); };
    Eigen::VectorXd theta = w.unaryExpr([](double v) { return sign_of(v); });
    for (int outer = 0; outer < 500; ++outer) {
      std::vector<Eigen::Index> active;
      for (Eigen::Index j = 0; j < n; ++j)
        if (theta[j] != 0.0) active.push_back(j);
      if (!active.empty()) {
        const auto na = static_cast<Eigen::Index>(active.size());
        Eigen::MatrixXd As(A.rows(), na);
        Eigen::VectorXd ts(na), ws(na);
        for (Eigen::Index i = 0; i < na; ++i) {
          As.col(i) = A.col(active[static_cast<std::size_t>(i)]);
          ts[i] = theta[active[static_cast<std::size_t>(i)]];
          ws[i] = w[active[static_cast<std::size_t>(i)]];
        }
        const Eigen::MatrixXd G = As.transpose() * As;
        const Eigen::VectorXd rhs = As.transpose() * b - lambda * ts;
        const Eigen::VectorXd wn = G.completeOrthogonalDecomposition().solve(rhs);
        bool consistent = wn.allFinite();
        for (Eigen::Index i = 0; i < na && consistent; ++i) consistent = sign_of(wn[i]) == ts[i];
        if (consistent) {
          for (Eigen::Index i = 0; i < na; ++i) w[active[static_cast<std::size_t>(i)]] = wn[i];
        } else if (wn.allFinite()) {
          // Best point among the zero crossings on the segment ws -> wn.
          Eigen::VectorXd best = w;
          double fbest = objective(w);
          for (Eigen::Index i = 0; i < na; ++i) {
            if (sign_of(wn[i]) == sign_of(ws[i]) || ws[i] == wn[i]) continue;
            const double tau = ws[i] / (ws[i] - wn[i]);
            if (!(tau >= 0.0 && tau <= 1.0)) continue;
            Eigen::VectorXd cand = w;
            for (Eigen::Index k = 0; k < na; ++k) cand[active[static_cast<std::size_t>(k)]] = ws[k] + tau * (wn[k] - ws[k]);
            cand[active[static_cast<std::size_t>(i)]] = 0.0;
            const double fc = objective(cand);
            if (fc < fbest) {
              fbest = fc;
              best = cand;
            }
          }
          if (best == w) return;
          w = best;
          for (Eigen::Index j = 0; j < n; ++j)
            if (w[j] == 0.0) theta[j] = 0.0;
          for (Eigen::Index j = 0; j < n; ++j)
            if (w[j] != 0.0) theta[j] = sign_of(w[j]);
          continue;
        } else {
          return;
        }
      }
      const Eigen::VectorXd grad = A.transpose() * (b - A * w);
      Eigen::Index jmax = -1;
      double gmax = lambda * (1.0 + 1e-12);
      for (Eigen::Index j = 0; j < n; ++j)
        if (theta[j] == 0.0 && std::abs(grad[j]) > gmax) {
          gmax = std::abs(grad[j]);
          jmax = j;
        }
      if (jmax < 0) return;
      theta[jmax] = sign_of(grad[jmax]);
    }
  }

  const FitProblem& problem_;
  SolverOptions opt_;
  std::unique_ptr<Dictionary> dict_;
  Eigen::MatrixXd N_;
  Eigen::MatrixXd Q_;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> n_solver_;
  Eigen::VectorXd y_;
  Eigen::VectorXd c0_;
  std::vector<Eigen::VectorXd> candidates_;
  std::vector<std::vector<int>> neighbours_;
  Eigen::MatrixXd cand_matrix_;
  Eigen::VectorXd step_;
};

void validate(const FitProblem& problem) {
  const Eigen::Index M = problem.y.size();
  if (M < 1) throw Error(errc::kInvalidArgument, "fit: at least one data point is required");
  if (problem.x.rows() != M) throw Error(errc::kInvalidArgument, "fit: locations and values differ in count");
  if (problem.x.cols() != family_dim(problem.family))
    throw Error(errc::kInvalidArgument, "fit: location dimension does not match the family");
  if (!problem.x.allFinite() || !problem.y.allFinite()) throw Error(errc::kInvalidArgument, "fit: non-finite data");
  if (!problem.interpolate && !(problem.lambda > 0.0)) throw Error(errc::kInvalidArgument, "fit: lambda must be positive");
  if (problem.loss.kind == Loss::Kind::huber && !(problem.loss.delta > 0.0))
    throw Error(errc::kInvalidArgument, "fit: Huber threshold must be positive");
  const double period = std::holds_alternative<PeriodicFamily>(problem.family)
                            ? std::get<PeriodicFamily>(problem.family).period
                            : 0.0;
  for (Eigen::Index i = 0; i < M; ++i)
    for (Eigen::Index j = 0; j < i; ++j) {
      double d = (problem.x.row(i) - problem.x.row(j)).norm();
      if (period > 0.0) {
        d = std::fmod(std::abs(problem.x(i, 0) - problem.x(j, 0)), period);
        d = std::min(d, period - d);
      }
      if (d == 0.0) throw Error(errc::kInvalidArgument, "fit: data locations must be pairwise distinct");
    }
}

}  // namespace

std::string status_name(FitStatus status) {
  switch (status) {
    case FitStatus::converged:
      return "converged";
    case FitStatus::not_converged:
      return "not_converged";
    case FitStatus::infeasible_interpolation:
      return "infeasible_interpolation";
  }
  return "unknown";
}

double objective(const FitProblem& problem, const Model& model) {
  const Eigen::VectorXd r = problem.y - evaluate_points(model, problem.x);
  double e = 0.0;
  for (Eigen::Index m = 0; m < r.size(); ++m) e += problem.loss.value(r[m]);
  double norm = 0.0;
  std::visit([&norm](const auto& m) {
    for (const auto& a : m.atoms) norm += std::abs(a.weight);
  }, model);
  return e + problem.lambda * norm;
}

FitResult fit(const FitProblem& problem, const SolverOptions& options) {
  validate(problem);
  ExchangeSolver solver(problem, options);
  return solver.run();
}

double certificate_sup(const FitProblem& problem, const Model& model, const SolverOptions& options, int refine) {
  validate(problem);
  ExchangeSolver solver(problem, options);
  return solver.certificate_sup_on(model, refine);
}

SeminormReport verify_seminorm_ridge(const RidgeModel& model, const SeminormOptions& opt) {
  if (model.family.dim != 2) throw Error(errc::kUnsupportedDimension, "verify_seminorm_ridge: planar models only");
  if (model.family.m != 2) throw Error(errc::kInvalidArgument, "verify_seminorm_ridge: implemented for m = 2");
  SeminormReport report;
  for (const RidgeAtom& a : model.atoms) report.expected += std::abs(a.weight);
  if (model.atoms.empty()) return report;

  const double sigma = opt.mollifier_width;
  double reach = 0.0;
  for (const RidgeAtom& a : model.atoms) reach = std::max(reach, std::abs(a.offset));
  const double taper_start = reach + 2.0;
  const double half = std::max(40.0, 16.0 * taper_start);
  const double interior = taper_start - 0.5;
  const SinogramGrid layout = SinogramGrid::layout(opt.n_t, -half, half, opt.n_dir);

  // Gaussian-mollified ReLU, tapered smoothly to zero near the ends of the t range.
  auto profile = [sigma, taper_start](double s, double t_abs) {
    const double z = s / sigma;
    const double v = sigma * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi) + s * 0.5 * std::erfc(-z / std::sqrt(2.0));
    const Cutoff c;
    return v * (1.0 - c(1.0 + std::max(0.0, t_abs - taper_start)));
  };

  SinogramGrid concentrated = layout;
  concentrated.values.setZero();
  for (const RidgeAtom& a : model.atoms) {
    const double t0 = a.offset;
    const RidgeProfile r = RidgeProfile::function([&profile, t0](double t) { return profile(t, std::abs(t + t0)); });
    const SinogramGrid g = radon_of_ridge(r, t0, a.direction, layout, opt.angular_tol);
    concentrated.values += a.weight * g.values;
  }
  // Two bumps outside the measured band cancel the mean and first moment of each
  // column, so that R f decays and truncating it to the t window stays harmless.
  auto bump = [](double t, double center) {
    const double u = 2.0 * (t - center);
    return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0;
  };
  const double c1 = -taper_start - 1.3, c2 = -taper_start - 0.2;
  Eigen::Matrix2d moments = Eigen::Matrix2d::Zero();
  Eigen::MatrixXd shapes(layout.n_t(), 2);
  for (int i = 0; i < layout.n_t(); ++i) {
    const double t = layout.t(i);
    shapes(i, 0) = bump(t, c1);
    shapes(i, 1) = bump(t, c2);
    moments.row(0) += shapes.row(i);
    moments.row(1) += t * shapes.row(i);
  }
  const Eigen::PartialPivLU<Eigen::Matrix2d> moment_lu(moments);
  for (int k = 0; k < layout.n_dir(); ++k) {
    Eigen::Vector2d m = Eigen::Vector2d::Zero();
    for (int i = 0; i < layout.n_t(); ++i) m += concentrated.values(i, k) * Eigen::Vector2d(1.0, layout.t(i));
    if (m.isZero(0.0)) continue;
    concentrated.values.col(k) -= shapes * moment_lu.solve(m);
  }
  // R f realized through the ridge identity (convolution with q_d), then K_rad.
  const SinogramGrid radon_f = deconvolve_Krad(concentrated, 0.0);
  const SinogramGrid filtered = filter_Krad(radon_f);
  const SinogramGrid diff = differentiate_t(filtered, model.family.m);

  double tv = 0.0;
  for (int k = 0; k < diff.n_dir(); ++k)
    for (int i = 0; i < diff.n_t(); ++i)
      if (std::abs(diff.t(i)) <= interior) tv += std::abs(diff.values(i, k));
  report.numeric = 2.0 * diff.dtheta() * diff.dt() * tv;
  report.rel_deviation = std::abs(report.numeric - report.expected) / report.expected;
  return report;
}

ModelGrowthReport ridge_growth_check(const RidgeModel& model, const std::vector<double>& radii, int n_dirs,
                                     double slope_tolerance) {
  ModelGrowthReport report;
  double mass = 0.0;
  for (const RidgeAtom& a : model.atoms) mass += std::abs(a.weight);
  if (mass == 0.0) mass = 1.0;
  const int d = model.family.dim;
  std::vector<std::pair<double, double>> shells;
  for (double r : radii) {
    double shell_max = 0.0;
    for (int k = 0; k < n_dirs; ++k) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
      if (d == 1) {
        x[0] = (k % 2 == 0 ? 1.0 : -1.0) * r;
      } else {
        const double phi = 2.0 * std::numbers::pi * (k + 0.5) / n_dirs;
        x[0] = r * std::cos(phi);
        x[1] = r * std::sin(phi);
      }
      const double ratio = std::abs(evaluate_model(model, x)) / (mass * std::pow(1.0 + r, model.family.m - 1));
      report.samples.push_back({r, ratio});
      report.bound_C = std::max(report.bound_C, ratio);
      shell_max = std::max(shell_max, ratio);
    }
    if (shell_max > 0.0) shells.emplace_back(std::log(1.0 + r), std::log(shell_max));
  }
  // far field: the outer half of the radii
  std::sort(shells.begin(), shells.end());
  shells.erase(shells.begin(), shells.begin() + static_cast<std::ptrdiff_t>(shells.size() / 2));
  if (shells.size() >= 2) {
    double mx = 0.0, my = 0.0;
    for (const auto& [a, b] : shells) {
      mx += a;
      my += b;
    }
    mx /= shells.size();
    my /= shells.size();
    double sxy = 0.0, sxx = 0.0;
    for (const auto& [a, b] : shells) {
      sxy += (a - mx) * (b - my);
      sxx += (a - mx) * (a - mx);
    }
    report.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  }
  report.passed = std::isfinite(report.bound_C) && report.slope <= slope_tolerance;
  return report;
}

}  // namespace lizkit
