#pragma once

#include <functional>
#include <map>
#include <vector>

#include "cartanlab/multilinear.hpp"
#include "cartanlab/polynomial.hpp"
#include "cartanlab/types.hpp"

namespace cartanlab {

enum class Backend { Poly, Sampled };

/// Smooth map between chart domains: evaluator plus optional exact Jacobian.
/// Without a Jacobian, derivatives fall back to the shared stencil rules.
struct ChartMap {
  Box domain;
  int codim = 0;
  std::function<Vec(const Vec&)> eval;
  std::function<Mat(const Vec&)> jacobian; // may be empty

  Mat jacobian_at(const Vec& x) const;
};

/// Differential p-form on a chart box with values in R^target_dim.
///
/// Poly backend: exact coefficients, one polynomial vector per strictly
/// increasing index tuple, in the convention
///   dx^{i_1..i_p}(v_1..v_p) = det(v_j[i_l]).
/// Sampled backend: a pointwise multilinear alternating evaluator; derivative
/// operators then use 5-point central differences with relative step 1e-4
/// (1e-3 once the field is itself a finite-difference derivative).
class FormField {
public:
  using Coefficients = std::map<std::vector<int>, std::vector<Polynomial>>;
  using Evaluator = std::function<Vec(const Vec&, const std::vector<Vec>&)>;

  static FormField poly(Box domain, int degree, int target_dim, Coefficients coef);
  static FormField poly_zero(Box domain, int degree, int target_dim);
  static FormField sampled(Box domain, int degree, int target_dim, Evaluator eval,
                           int derivative_depth = 0);

  Backend backend() const { return m_backend; }
  int chart_dim() const { return m_domain.dim(); }
  int degree() const { return m_degree; }
  int target_dim() const { return m_target_dim; }
  const Box& domain() const { return m_domain; }
  int derivative_depth() const { return m_depth; }

  Vec eval(const Vec& x, const std::vector<Vec>& args) const;
  /// Degree-1 convenience: matrix with columns eval(x, {e_j}).
  Mat coefficient_matrix(const Vec& x) const;

  const Coefficients& coefficients() const;
  /// View this field through a sampled evaluator (no-op for Sampled).
  Evaluator as_evaluator() const;

  friend FormField operator+(const FormField& a, const FormField& b);
  friend FormField operator-(const FormField& a, const FormField& b);
  friend FormField operator*(double s, const FormField& f);

private:
  FormField() = default;

  Backend m_backend = Backend::Poly;
  Box m_domain;
  int m_degree = 0;
  int m_target_dim = 0;
  int m_depth = 0;
  Coefficients m_coef;
  Evaluator m_eval;
};

/// d of a form; exact on Poly coefficients, stencil-based on Sampled fields.
FormField exterior_derivative(const FormField& f);

/// [phi, psi]^ in the shuffle convention, so [phi,psi]^(X,Y) =
/// [phi X, psi Y] - [phi Y, psi X] for 1-forms.
FormField wedge_bracket(const FormField& phi, const FormField& psi, const LieAlgebra& L);

/// (rho^(kappa) psi)(x_0..x_p) = sum_i (-1)^i rho(kappa(x_i)) psi(.. ^i ..).
FormField rho_wedge(const FormField& kappa, const MatrixRep& rho, const FormField& psi);

/// Scalar-valued form f o (psi_1 (x) ... (x) psi_k) in the shuffle convention
/// (each permutation class of arguments counted once per slot ordering).
FormField apply_multilinear(const MultilinearFunction& f, const std::vector<FormField>& psi);

/// Pullback along a chart map; the result lives on map.domain and is Sampled.
FormField pullback(const ChartMap& map, const FormField& f);

/// Constant linear map applied to the values: (M f)(x)(args) = M (f(x)(args)).
FormField postcompose(const Mat& M, const FormField& f);

/// Spot-check residuals for sampled evaluators (Poly fields return 0).
double multilinearity_residual(const FormField& f, int samples, std::uint64_t seed);
double alternation_residual(const FormField& f, int samples, std::uint64_t seed);

/// Largest |f(x)(e_{i_1}..e_{i_p})| over sample points and basis tuples.
double sup_norm(const FormField& f, const std::vector<Vec>& points);

/// 5-point directional derivative of a vector-valued function, step
/// 1e-4 * (1 + |x|) at depth 0 and 1e-3 * (1 + |x|) for nested derivatives.
Vec directional_derivative(const std::function<Vec(const Vec&)>& fn, const Vec& x,
                           const Vec& dir, int depth = 0);

/// Enumerate the (p_1,..,p_k)-splits of {0..P-1} with interleave signs.
void for_each_split(int total, const std::vector<int>& sizes,
                    const std::function<void(const std::vector<std::vector<int>>&, double)>& fn);

} // namespace cartanlab
