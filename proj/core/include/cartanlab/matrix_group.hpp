#pragma once

#include <functional>

#include "cartanlab/form_field.hpp"
#include "cartanlab/lie_algebra.hpp"
#include "cartanlab/polynomial.hpp"

namespace cartanlab {

/// exp of an algebra element, evaluated through the representation.
Mat group_exp(const MatrixRep& rep, const Vec& x);

/// Principal matrix log pulled back to algebra coordinates.  Throws
/// OutOfBranch when the spectral radius of g - I reaches 1 (the element is
/// too far from the identity for the principal branch) and NotInAlgebra when
/// the log does not lie in the generator span.
Vec group_log(const MatrixRep& rep, const Mat& g);

/// Matrix of Ad(g) on algebra coordinates, so Ad(g) x = coords(g rho(x) g^-1).
/// Throws SubgroupViolation when conjugation leaves the generator span.
Mat adjoint_action(const MatrixRep& rep, const Mat& g);

/// sum_{k>=0} (-M)^k / (k+1)!, the left logarithmic derivative of exp:
/// d/ds exp(t + s tau)|_0 = exp(t) rho(phi1(ad t) tau) in any representation.
Mat phi1(const Mat& M);

/// Smooth map from a chart box into a matrix group.
class GroupValuedMap {
public:
  static GroupValuedMap sampled(Box domain, int mat_dim, std::function<Mat(const Vec&)> eval);
  /// x -> exp(rho(P(x))) for a polynomial curve P in algebra coordinates.
  static GroupValuedMap exp_of_polynomial(const MatrixRep& rep, Box domain, PolynomialMap P);

  const Box& domain() const { return m_domain; }
  int mat_dim() const { return m_mat_dim; }
  Mat eval(const Vec& x) const { return m_eval(x); }

private:
  GroupValuedMap() = default;

  Box m_domain;
  int m_mat_dim = 0;
  std::function<Mat(const Vec&)> m_eval;
};

/// delta^l(a)(v) = coords(a(x)^-1 D_v a(x)); solves the left structure
/// equation d delta + 1/2 [delta, delta]^ = 0.
FormField left_log_derivative(const MatrixRep& rep, const GroupValuedMap& a);

/// delta^r(a)(v) = coords(D_v a(x) a(x)^-1) = Ad(a) delta^l(a).
FormField right_log_derivative(const MatrixRep& rep, const GroupValuedMap& a);

} // namespace cartanlab
