#pragma once

#include <string>
#include <vector>

#include "cartanlab/types.hpp"

namespace cartanlab {

/// Finite dimensional real Lie algebra given by structure constants.
/// Construction validates antisymmetry and the Jacobi identity to 1e-12
/// relative to the largest structure constant.
class LieAlgebra {
public:
  /// table[i][j] must hold the coordinates of [e_i, e_j].
  LieAlgebra(std::string name, const std::vector<std::vector<Vec>>& table);

  const std::string& name() const { return m_name; }
  int dim() const { return static_cast<int>(m_ad.size()); }

  Vec bracket(const Vec& x, const Vec& y) const;
  /// Matrix of ad(x) = [x, .] in the defining basis.
  Mat ad(const Vec& x) const;
  Mat ad_basis(int i) const { return m_ad[i]; }
  double structure_constant(int i, int j, int k) const { return m_ad[i](k, j); }

  /// Matrix of the Killing form B(x, y) = tr(ad x ad y).
  Mat killing_matrix() const;

  double antisymmetry_residual() const;
  double jacobi_residual() const;

private:
  std::string m_name;
  std::vector<Mat> m_ad;
};

/// Closure-checked construction from explicit matrices: brackets are matrix
/// commutators re-expanded in the given basis.  Throws NotClosed if a
/// commutator leaves the span, so the result is a genuine linear Lie algebra.
LieAlgebra algebra_from_matrices(const std::string& name, const std::vector<Mat>& basis);

/// Subalgebra g of h recorded by an inclusion matrix on coordinates.
struct SubalgebraEmbedding {
  LieAlgebra h;
  LieAlgebra g;
  Mat inclusion; // dim h x dim g, full column rank

  Vec include(const Vec& xg) const { return inclusion * xg; }
  /// Least squares coordinates of xh in the image; residual reports the
  /// distance to the image, zero for genuine subalgebra elements.
  Vec restrict_to_g(const Vec& xh, double* residual = nullptr) const;
  /// Orthogonal projector of R^{dim h} onto the embedded copy of g.
  Mat projector() const;
};

/// Derive the subalgebra structure from a spanning set of h-coordinates.
/// Throws NotClosed when the span is not bracket-closed (residual > 1e-10).
SubalgebraEmbedding make_subalgebra(const LieAlgebra& h, const std::string& g_name,
                                    const std::vector<Vec>& basis_in_h);

/// Linear representation by explicit generator matrices.  Construction
/// checks rho([x,y]) = [rho x, rho y] to 1e-10.
class MatrixRep {
public:
  MatrixRep(LieAlgebra algebra, std::vector<Mat> generators);

  const LieAlgebra& algebra() const { return m_algebra; }
  int mat_dim() const { return static_cast<int>(m_gen.front().rows()); }
  const Mat& generator(int i) const { return m_gen[i]; }

  Mat map(const Vec& x) const;
  /// Least squares coordinates of m in the generator span; the residual is
  /// the Frobenius distance between m and its span projection.
  Vec project(const Mat& m, double* residual = nullptr) const;
  double homomorphism_residual() const;

private:
  LieAlgebra m_algebra;
  std::vector<Mat> m_gen;
  Mat m_span; // mat_dim^2 x dim, column i = vec(generator i)
};

/// Representation of a subalgebra obtained by restricting along the embedding.
MatrixRep restrict_rep(const MatrixRep& rep_h, const SubalgebraEmbedding& emb);

/// ad as a matrix representation of L on its own coordinate space.
MatrixRep adjoint_rep(const LieAlgebra& L);

/// Semidirect sum g acting on the abelian ideal V = R^r through rho.
/// Basis order is [V block, g block] so that [(u,X),(v,Y)] =
/// (rho(X)v - rho(Y)u, [X,Y]).
LieAlgebra semidirect(const MatrixRep& rho, const std::string& name);

} // namespace cartanlab
