#pragma once

#include <map>
#include <vector>

#include "cartanlab/types.hpp"

namespace cartanlab {

/// Sparse real polynomial in n variables.  Terms are kept in a sorted map
/// from exponent tuples to coefficients, so iteration order and therefore
/// every derived computation is deterministic.
class Polynomial {
public:
  using Exponents = std::vector<int>;

  Polynomial() : m_nvars(0) {}
  explicit Polynomial(int nvars) : m_nvars(nvars) {}

  static Polynomial constant(int nvars, double c);
  static Polynomial variable(int nvars, int i);

  int nvars() const { return m_nvars; }
  /// Total degree; -1 for the zero polynomial.
  int degree() const;
  bool is_zero() const { return m_terms.empty(); }

  double coefficient(const Exponents& e) const;
  void set_coefficient(const Exponents& e, double c);
  void add_term(const Exponents& e, double c);
  const std::map<Exponents, double>& terms() const { return m_terms; }

  double eval(const Vec& x) const;
  Polynomial derivative(int var) const;
  Polynomial truncated(int max_degree) const;
  /// Substitute subs[i] for variable i; truncate at max_degree if >= 0.
  Polynomial compose(const std::vector<Polynomial>& subs, int max_degree = -1) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(double s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  double max_abs_coefficient() const;

private:
  int m_nvars;
  std::map<Exponents, double> m_terms;
};

/// Product with all terms above max_degree dropped (saves work in jet code).
Polynomial mul_truncated(const Polynomial& a, const Polynomial& b, int max_degree);

/// Component-wise polynomial map between chart spaces.
struct PolynomialMap {
  std::vector<Polynomial> comp;

  int nvars() const { return comp.empty() ? 0 : comp.front().nvars(); }
  int size() const { return static_cast<int>(comp.size()); }

  Vec eval(const Vec& x) const;
  Mat jacobian(const Vec& x) const;
};

} // namespace cartanlab
