#include "lizkit/polynomial.hpp"

#include <cmath>
#include <numeric>

#include "lizkit/errors.hpp"

namespace lizkit {

int total_degree(const MultiIndex& k) { return std::accumulate(k.begin(), k.end(), 0); }

double multi_factorial(const MultiIndex& k) {
  double f = 1.0;
  for (int ki : k)
    for (int j = 2; j <= ki; ++j) f *= j;
  return f;
}

double monomial(const Eigen::VectorXd& x, const MultiIndex& k) {
  double v = 1.0;
  for (std::size_t i = 0; i < k.size(); ++i)
    for (int j = 0; j < k[i]; ++j) v *= x[static_cast<Eigen::Index>(i)];
  return v;
}

namespace {

void enumerate_degree(int dim, int degree, std::size_t pos, MultiIndex& cur, std::vector<MultiIndex>& out) {
  if (pos + 1 == static_cast<std::size_t>(dim)) {
    cur[pos] = degree;
    out.push_back(cur);
    return;
  }
  for (int k = degree; k >= 0; --k) {
    cur[pos] = k;
    enumerate_degree(dim, degree - k, pos + 1, cur, out);
  }
}

}  // namespace

std::vector<MultiIndex> multi_indices_up_to(int dim, int max_degree) {
  if (dim < 1) throw Error(errc::kInvalidArgument, "multi_indices_up_to: dimension must be >= 1");
  std::vector<MultiIndex> out;
  MultiIndex cur(dim, 0);
  for (int deg = 0; deg <= max_degree; ++deg) enumerate_degree(dim, deg, 0, cur, out);
  return out;
}

Polynomial Polynomial::constant(int dim, double c) {
  Polynomial p(dim);
  p.add_term(MultiIndex(dim, 0), c);
  return p;
}

Polynomial Polynomial::coordinate(int dim, int i) {
  Polynomial p(dim);
  MultiIndex k(dim, 0);
  k[i] = 1;
  p.add_term(k, 1.0);
  return p;
}

Polynomial Polynomial::squared_norm(int dim) {
  Polynomial p(dim);
  for (int i = 0; i < dim; ++i) {
    MultiIndex k(dim, 0);
    k[i] = 2;
    p.add_term(k, 1.0);
  }
  return p;
}

int Polynomial::degree() const {
  int deg = 0;
  for (const auto& [k, c] : terms_) deg = std::max(deg, total_degree(k));
  return deg;
}

void Polynomial::add_term(const MultiIndex& k, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms_.emplace(k, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::operator()(const Eigen::VectorXd& x) const {
  double v = 0.0;
  for (const auto& [k, c] : terms_) v += c * monomial(x, k);
  return v;
}

Polynomial Polynomial::derivative(int i) const {
  Polynomial out(dim_);
  for (const auto& [k, c] : terms_) {
    if (k[i] == 0) continue;
    MultiIndex kk = k;
    kk[i] -= 1;
    out.add_term(kk, c * k[i]);
  }
  return out;
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  Polynomial out = a;
  for (const auto& [k, c] : b.terms_) out.add_term(k, c);
  return out;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out(a.dim_);
  for (const auto& [ka, ca] : a.terms_) {
    for (const auto& [kb, cb] : b.terms_) {
      MultiIndex k(ka.size());
      for (std::size_t i = 0; i < k.size(); ++i) k[i] = ka[i] + kb[i];
      out.add_term(k, ca * cb);
    }
  }
  return out;
}

Polynomial operator*(double s, const Polynomial& a) {
  Polynomial out(a.dim_);
  for (const auto& [k, c] : a.terms_) out.add_term(k, s * c);
  return out;
}

}  // namespace lizkit
