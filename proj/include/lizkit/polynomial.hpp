#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

namespace lizkit {

/// Exponent tuple (k_1, ..., k_d); also used as a derivative multi-index.
using MultiIndex = std::vector<int>;

int total_degree(const MultiIndex& k);
double multi_factorial(const MultiIndex& k);
/// x^k = prod_i x_i^{k_i}
double monomial(const Eigen::VectorXd& x, const MultiIndex& k);

/// All multi-indices of dimension d with |k| <= max_degree, graded then lexicographic.
std::vector<MultiIndex> multi_indices_up_to(int dim, int max_degree);

/// Sparse multivariate polynomial with real coefficients.
class Polynomial {
 public:
  explicit Polynomial(int dim) : dim_(dim) {}

  static Polynomial constant(int dim, double c);
  static Polynomial coordinate(int dim, int i);
  /// ||x||^2 = sum_i x_i^2
  static Polynomial squared_norm(int dim);

  int dim() const { return dim_; }
  int degree() const;
  const std::map<MultiIndex, double>& terms() const { return terms_; }

  void add_term(const MultiIndex& k, double c);
  double operator()(const Eigen::VectorXd& x) const;

  Polynomial derivative(int i) const;

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double s, const Polynomial& a);

 private:
  int dim_;
  std::map<MultiIndex, double> terms_;
};

}  // namespace lizkit
