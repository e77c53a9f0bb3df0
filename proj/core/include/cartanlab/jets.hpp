#pragma once

#include <string>
#include <vector>

#include "cartanlab/lie_algebra.hpp"
#include "cartanlab/polynomial.hpp"
#include "cartanlab/prolongation.hpp"
#include "cartanlab/types.hpp"

namespace cartanlab {

/// Hard bounds on jet order and chart dimension; the monomial bases grow
/// combinatorially and everything downstream is tuned for small charts.
inline constexpr int kMaxJetOrder = 3;
inline constexpr int kMaxJetVars = 3;

/// Truncated Taylor expansion at the origin of a chart map fixing the
/// origin.  Components are polynomials without constant term, cut at the
/// jet order; elements with invertible linear part form a group under
/// composition.
class JetElement {
public:
  JetElement(PolynomialMap map, int order);

  static JetElement identity(int nvars, int order);
  /// Jet of the linear map x -> a x.
  static JetElement linear(const Mat& a, int order);

  int nvars() const { return m_map.size(); }
  int order() const { return m_order; }
  const PolynomialMap& map() const { return m_map; }
  const Polynomial& component(int i) const { return m_map.comp[static_cast<std::size_t>(i)]; }

  Mat linear_block() const;
  Vec eval(const Vec& x) const { return m_map.eval(x); }
  /// Largest coefficient difference across components.
  double distance(const JetElement& o) const;

private:
  PolynomialMap m_map;
  int m_order;
};

/// Truncated Taylor expansion of a vector field at the origin; unlike
/// JetElement the components may carry constant terms.
class JetVectorField {
public:
  JetVectorField(PolynomialMap comp, int order);

  static JetVectorField zero(int nvars, int order);
  static JetVectorField constant(const Vec& v, int order);
  /// Field x -> a x.
  static JetVectorField linear(const Mat& a, int order);

  int nvars() const { return m_comp.size(); }
  int order() const { return m_order; }
  const PolynomialMap& components() const { return m_comp; }
  const Polynomial& component(int i) const { return m_comp.comp[static_cast<std::size_t>(i)]; }

  bool vanishes_at_origin() const;
  Vec constant_term() const;
  Mat linear_block() const;
  Vec eval(const Vec& x) const { return m_comp.eval(x); }
  double distance(const JetVectorField& o) const;

  JetVectorField& operator+=(const JetVectorField& o);
  JetVectorField& operator-=(const JetVectorField& o);
  JetVectorField& operator*=(double s);

  friend JetVectorField operator+(JetVectorField a, const JetVectorField& b) { return a += b; }
  friend JetVectorField operator-(JetVectorField a, const JetVectorField& b) { return a -= b; }
  friend JetVectorField operator*(JetVectorField a, double s) { return a *= s; }
  friend JetVectorField operator*(double s, JetVectorField a) { return a *= s; }

private:
  PolynomialMap m_comp;
  int m_order;
};

/// Jet of a after b (apply b first), truncated at the common order.
JetElement jet_compose(const JetElement& a, const JetElement& b);

/// Compositional inverse; the linear part must be invertible.
JetElement jet_invert(const JetElement& a);

/// Negative of the vector field bracket, truncated:
///   jet_bracket(X, Y)^i = sum_j (d_j X^i Y^j - d_j Y^i X^j).
/// On linear fields this is the plain matrix commutator of the blocks, so
/// constant and linear fields reproduce the affine algebra of V.
JetVectorField jet_bracket(const JetVectorField& X, const JetVectorField& Y);

/// Time-one flow jet of a field vanishing at the origin.  The Lie-derivative
/// operator on the monomial basis of degrees 1..order is exact for such
/// fields, so this is the true jet of the flow, not an integrator estimate.
JetElement jet_exp(const JetVectorField& X);

/// Pullback of the field along the jet: (Da)^-1 (X after a), truncated.
/// Contravariant: jet_adjoint(jet_compose(a, b), X) composes as b then a.
/// Its t-derivative along jet_exp(t X) at t = 0 is -jet_bracket(X, Y).
JetVectorField jet_adjoint(const JetElement& a, const JetVectorField& X);

/// Lie algebra on V + g + g^(1) + .. + g^(order - 1), realized as the span
/// of the constant, linear and higher polynomial fields attached to the
/// prolongations of g, with the jet_bracket table.  Requires the order-th
/// prolongation to vanish, so no bracket is ever cut by the truncation.
LieAlgebra g_infinity_truncated(const LinearLieAlgebra& g, int order);

/// Canonical flat connection of the order-k model geometry of g: the
/// principal model carries the truncated symbol algebra in its adjoint
/// representation over the fiber algebra g + .. + g^(order - 1), and the
/// connection is the Maurer-Cartan form of the product chart.  The symbol
/// algebra must be centerless; a zero g degenerates to the coordinate
/// parallelism on a bare chart.
CartanConnection flat_model_connection(const LinearLieAlgebra& g, int order,
                                       double base_radius = 1.0, double fiber_radius = 0.3);

} // namespace cartanlab
