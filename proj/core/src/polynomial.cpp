#include "cartanlab/polynomial.hpp"

#include <cmath>
#include <numeric>

namespace cartanlab {

namespace {

int total_degree(const Polynomial::Exponents& e) {
  return std::accumulate(e.begin(), e.end(), 0);
}

} // namespace

Polynomial Polynomial::constant(int nvars, double c) {
  Polynomial p(nvars);
  if (c != 0.0) p.m_terms[Exponents(nvars, 0)] = c;
  return p;
}

Polynomial Polynomial::variable(int nvars, int i) {
  require(i >= 0 && i < nvars, Err::InvalidArgument, "variable index");
  Polynomial p(nvars);
  Exponents e(nvars, 0);
  e[i] = 1;
  p.m_terms[e] = 1.0;
  return p;
}

int Polynomial::degree() const {
  int d = -1;
  for (const auto& [e, c] : m_terms) d = std::max(d, total_degree(e));
  return d;
}

double Polynomial::coefficient(const Exponents& e) const {
  auto it = m_terms.find(e);
  return it == m_terms.end() ? 0.0 : it->second;
}

void Polynomial::set_coefficient(const Exponents& e, double c) {
  require(static_cast<int>(e.size()) == m_nvars, Err::DimensionMismatch, "exponent tuple");
  if (c == 0.0)
    m_terms.erase(e);
  else
    m_terms[e] = c;
}

void Polynomial::add_term(const Exponents& e, double c) {
  require(static_cast<int>(e.size()) == m_nvars, Err::DimensionMismatch, "exponent tuple");
  double& slot = m_terms[e];
  slot += c;
  if (slot == 0.0) m_terms.erase(e);
}

double Polynomial::eval(const Vec& x) const {
  require(x.size() == m_nvars, Err::DimensionMismatch, "evaluation point");
  double out = 0.0;
  for (const auto& [e, c] : m_terms) {
    double t = c;
    for (int i = 0; i < m_nvars; ++i)
      for (int k = 0; k < e[i]; ++k) t *= x[i];
    out += t;
  }
  return out;
}

Polynomial Polynomial::derivative(int var) const {
  require(var >= 0 && var < m_nvars, Err::InvalidArgument, "derivative variable");
  Polynomial out(m_nvars);
  for (const auto& [e, c] : m_terms) {
    if (e[var] == 0) continue;
    Exponents d = e;
    d[var] -= 1;
    out.add_term(d, c * e[var]);
  }
  return out;
}

Polynomial Polynomial::truncated(int max_degree) const {
  Polynomial out(m_nvars);
  for (const auto& [e, c] : m_terms)
    if (total_degree(e) <= max_degree) out.m_terms[e] = c;
  return out;
}

Polynomial Polynomial::compose(const std::vector<Polynomial>& subs, int max_degree) const {
  require(static_cast<int>(subs.size()) == m_nvars, Err::DimensionMismatch, "substitution list");
  const int out_vars = subs.empty() ? 0 : subs.front().nvars();
  Polynomial out(out_vars);
  for (const auto& [e, c] : m_terms) {
    Polynomial term = Polynomial::constant(out_vars, c);
    for (int i = 0; i < m_nvars; ++i)
      for (int k = 0; k < e[i]; ++k) {
        term = max_degree >= 0 ? mul_truncated(term, subs[i], max_degree) : term * subs[i];
        if (term.is_zero()) break;
      }
    out += term;
  }
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  require(m_nvars == o.m_nvars, Err::DimensionMismatch, "polynomial sum");
  for (const auto& [e, c] : o.m_terms) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  require(m_nvars == o.m_nvars, Err::DimensionMismatch, "polynomial difference");
  for (const auto& [e, c] : o.m_terms) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    m_terms.clear();
    return *this;
  }
  for (auto& [e, c] : m_terms) c *= s;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  return mul_truncated(a, b, -1);
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [e, c] : m_terms) m = std::max(m, std::abs(c));
  return m;
}

Polynomial mul_truncated(const Polynomial& a, const Polynomial& b, int max_degree) {
  require(a.nvars() == b.nvars(), Err::DimensionMismatch, "polynomial product");
  Polynomial out(a.nvars());
  Polynomial::Exponents e(a.nvars());
  for (const auto& [ea, ca] : a.terms())
    for (const auto& [eb, cb] : b.terms()) {
      int deg = 0;
      for (int i = 0; i < a.nvars(); ++i) {
        e[i] = ea[i] + eb[i];
        deg += e[i];
      }
      if (max_degree >= 0 && deg > max_degree) continue;
      out.add_term(e, ca * cb);
    }
  return out;
}

Vec PolynomialMap::eval(const Vec& x) const {
  Vec out(size());
  for (int i = 0; i < size(); ++i) out[i] = comp[i].eval(x);
  return out;
}

Mat PolynomialMap::jacobian(const Vec& x) const {
  Mat J(size(), nvars());
  for (int i = 0; i < size(); ++i)
    for (int j = 0; j < nvars(); ++j) J(i, j) = comp[i].derivative(j).eval(x);
  return J;
}

} // namespace cartanlab
