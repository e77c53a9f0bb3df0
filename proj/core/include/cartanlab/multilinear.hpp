#pragma once

#include <functional>
#include <vector>

#include "cartanlab/lie_algebra.hpp"

namespace cartanlab {

enum class Symmetry { None, Symmetric, Alternating };

/// Dense real k-linear function on R^dim, stored as a coefficient tensor
/// over the standard basis.  Sizes here stay small (dim <= 16, arity <= 4).
class MultilinearFunction {
public:
  MultilinearFunction(int dim, int arity, Symmetry sym = Symmetry::None);

  int dim() const { return m_dim; }
  int arity() const { return m_arity; }
  Symmetry symmetry() const { return m_sym; }

  double coefficient(const std::vector<int>& idx) const { return m_c[flat(idx)]; }
  void set_coefficient(const std::vector<int>& idx, double v) { m_c[flat(idx)] = v; }
  void add_coefficient(const std::vector<int>& idx, double v) { m_c[flat(idx)] += v; }

  double eval(const std::vector<Vec>& args) const;

  /// Deviation from the declared symmetry flag (0 when flag is None).
  double symmetry_residual() const;
  double max_abs_coefficient() const;

  /// Visit every nonzero coefficient as (index tuple, value).
  void for_each_nonzero(const std::function<void(const std::vector<int>&, double)>& fn) const;

private:
  std::size_t flat(const std::vector<int>& idx) const;

  int m_dim;
  int m_arity;
  Symmetry m_sym;
  std::vector<double> m_c;
};

/// Killing form as a symmetric bilinear function.
MultilinearFunction killing_form(const LieAlgebra& L);

/// Full polarization of X -> tr(rho(X)^power); symmetric and ad-invariant.
MultilinearFunction trace_power_form(const MatrixRep& rep, int power);

/// max over basis elements z and basis tuples of |sum_i f(.., [z, x_i], ..)|.
double invariance_residual(const LieAlgebra& L, const MultilinearFunction& f);

/// Differential of an alternating function f:
/// (df)(x_0..x_k) = sum_{i<j} (-1)^{i+j} f([x_i,x_j], x_0..^i..^j..x_k).
MultilinearFunction ce_differential(const LieAlgebra& L, const MultilinearFunction& f);

} // namespace cartanlab
