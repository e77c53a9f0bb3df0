#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cartanlab/form_field.hpp"
#include "cartanlab/local_model.hpp"
#include "cartanlab/sampling.hpp"

namespace cartanlab {

/// h-valued 1-form on a local model, the candidate parallelism.  Carries no
/// nondegeneracy promise; validators report residuals instead of failing, so
/// degenerate connections remain usable wherever inversion is not needed.
class GeneralizedCartanConnection {
public:
  GeneralizedCartanConnection(LocalModel model, FormField kappa);

  const LocalModel& model() const { return m_model; }
  const FormField& kappa() const { return m_kappa; }

  /// Assembled coefficient matrix of kappa at u (dim h rows).
  Mat kappa_matrix(const Vec& u) const { return m_kappa.coefficient_matrix(u); }
  double min_singular_value(int samples = 64, std::uint64_t seed = kDefaultSeed) const;

  /// kappa(zeta_X) = X solved pointwise; SingularCoframe past condition 1e12.
  Vec zeta_at(const Vec& u, const Vec& X) const;
  std::function<Vec(const Vec&)> zeta(const Vec& X) const;

  /// Right-action generator of X in g: the model's own field on principal
  /// models, kappa^{-1}(iota X) on bare ones.
  Vec fundamental_at(const Vec& u, const Vec& X) const;

  /// max over samples and g-generators of |kappa(zeta^P_X) - iota X|.
  double reproduction_residual(int samples = 64, std::uint64_t seed = kDefaultSeed) const;
  /// max over sampled (u, exp s) of |(r^g)* kappa - Ad(g^-1) kappa| (principal).
  double equivariance_residual(int samples = 64, std::uint64_t seed = kDefaultSeed) const;
  /// max over samples of |L_{zeta_Y} kappa + ad(Y) kappa| for g-generators Y.
  double infinitesimal_equivariance_residual(int samples = 64,
                                             std::uint64_t seed = kDefaultSeed) const;

private:
  LocalModel m_model;
  FormField m_kappa;
};

/// Nondegenerate case: the chart has dimension dim h and the assembled
/// coefficient matrix is invertible on samples.  Construction records the
/// smallest singular value seen and refuses outright singular input.
class CartanConnection : public GeneralizedCartanConnection {
public:
  CartanConnection(LocalModel model, FormField kappa, int samples = 64,
                   std::uint64_t seed = kDefaultSeed);

  double recorded_min_singular() const { return m_min_singular; }

private:
  double m_min_singular = 0.0;
};

/// K = d kappa + 1/2 [kappa, kappa]^.
FormField curvature(const GeneralizedCartanConnection& conn);

/// max over samples of |dK + [kappa, K]^| on random argument triples.
double bianchi_residual(const GeneralizedCartanConnection& conn, int samples = 64,
                        std::uint64_t seed = kDefaultSeed);

/// max over samples and g-generators of |psi(zeta^P_X, ...)|.
double horizontality_residual(const GeneralizedCartanConnection& conn, const FormField& psi,
                              int samples = 64, std::uint64_t seed = kDefaultSeed);

/// Connection-free variant for principal models, where the vertical
/// directions are fixed by the group action alone.
double horizontality_residual(const LocalModel& model, const FormField& psi, int samples = 64,
                              std::uint64_t seed = kDefaultSeed);

/// d_kappa psi = d psi + rho^(kappa) psi for a representation rho of h on W.
/// Validates horizontality of psi first and throws NotHorizontal otherwise.
FormField covariant_derivative(const GeneralizedCartanConnection& conn, const MatrixRep& rho,
                               const FormField& psi);

/// max over sampled (u, exp s) of |psi_{u.g}(T r^g args) - rho(g^-1) psi_u(args)|
/// for a representation rho of g on the value space (principal models).
double equivariance_residual(const LocalModel& model, const MatrixRep& rho_g,
                             const FormField& psi, int samples = 64,
                             std::uint64_t seed = kDefaultSeed);

/// Curvature contracted with the inverse parallelism:
/// k(u)(X, Y) = K(zeta_X(u), zeta_Y(u)), an element of h (x) Lambda^2 h*.
class CurvatureFunction {
public:
  explicit CurvatureFunction(CartanConnection conn);

  /// comp[k](i, j) = h-component k of K(zeta_{e_i}, zeta_{e_j}) at u.
  std::vector<Mat> at(const Vec& u) const;
  double antisymmetry_residual(int samples = 16, std::uint64_t seed = kDefaultSeed) const;
  /// max over sample pairs of the coefficient distance |k(u) - k(u')|.
  double constancy_residual(int samples = 16, std::uint64_t seed = kDefaultSeed) const;

private:
  CartanConnection m_conn;
  FormField m_curv;
};

CurvatureFunction curvature_function(const CartanConnection& conn);

/// Split kappa = theta + omega along h = V (+) g for a complement V given by
/// its coordinate columns.  theta takes values in V coordinates, omega in g
/// coordinates.  Throws NotReductive unless [g, V] stays inside V.
std::pair<FormField, FormField> reductive_split(const GeneralizedCartanConnection& conn,
                                                const Mat& complement_basis);

/// kappa_{(x,a)}(xi, zeta) = Ad(a^-1)(A(x) xi) + a^-1 zeta on a principal
/// model; both defining conditions hold by construction.  A(x) must return a
/// (dim h) x (base dim) matrix.
GeneralizedCartanConnection make_principal_cartan(const LocalModel& model,
                                                  std::function<Mat(const Vec&)> A);

/// Left Maurer-Cartan form of H in the exponential chart, as a Cartan
/// connection of type h/g on a bare model.
CartanConnection maurer_cartan(const std::string& pair_name, double radius = 1.0);

/// max over samples of |[zeta_X, zeta_Y] - zeta_{[X, iota Y]}| for random
/// X in h, Y in g; the defining axiom of a Cartan connection.
double bracket_axiom_residual(const CartanConnection& conn, int samples = 32,
                              std::uint64_t seed = kDefaultSeed);

/// max over samples of |zeta(K(zeta_X, zeta_Y)) - zeta([X,Y]) + [zeta_X, zeta_Y]|
/// for random X, Y in h; the curvature as the full bracket defect.
double bracket_defect_residual(const CartanConnection& conn, int samples = 32,
                               std::uint64_t seed = kDefaultSeed);

} // namespace cartanlab
