#pragma once

#include <optional>
#include <string>

#include "cartanlab/lie_algebra.hpp"
#include "cartanlab/types.hpp"

namespace cartanlab {

enum class ModelKind { BareManifold, Principal };

/// Chart-level stage for a Klein pair h/g.
///
/// A bare manifold is a single chart box whose dimension matches dim h, the
/// setting for absolute parallelisms.  A principal model is U x G in
/// coordinates (x, t), where t is the exponential chart of the structure
/// group G, so the fiber coordinate is an algebra vector and every group
/// quantity is reached through exp/log of the restricted representation.
class LocalModel {
public:
  static LocalModel bare(SubalgebraEmbedding pair, Box chart);
  static LocalModel principal(SubalgebraEmbedding pair, MatrixRep rep_h, Box base, Box fiber);

  ModelKind kind() const { return m_kind; }
  const SubalgebraEmbedding& pair() const { return m_pair; }
  const LieAlgebra& h() const { return m_pair.h; }
  const LieAlgebra& g() const { return m_pair.g; }
  const Box& chart() const { return m_chart; }
  int chart_dim() const { return m_chart.dim(); }

  int base_dim() const;
  int fiber_dim() const;
  const Box& base() const;
  const Box& fiber() const;
  /// Representation of g on the fiber group's matrix space (principal only).
  const MatrixRep& group_rep() const;
  /// The ambient representation of h the model was built from.
  const MatrixRep& ambient_rep() const;

  Vec base_part(const Vec& u) const { return u.head(base_dim()); }
  Vec fiber_part(const Vec& u) const { return u.tail(fiber_dim()); }

  /// Group element at u, as a matrix in the restricted representation.
  Mat group_at(const Vec& u) const;
  /// Chart velocity of the right-action generator of X in g at u.
  Vec fundamental_field(const Vec& u, const Vec& X) const;
  /// Chart coordinates of u . exp(s) for s in g.
  Vec right_translate(const Vec& u, const Vec& s) const;
  /// Chart differential of the right translation by exp(s) at u.
  Mat right_translate_differential(const Vec& u, const Vec& s) const;
  /// Ad(exp(s)^-1) acting on h coordinates, for s in g.
  Mat ad_inverse_on_h(const Vec& s) const;

private:
  explicit LocalModel(SubalgebraEmbedding pair) : m_pair(std::move(pair)) {}

  ModelKind m_kind = ModelKind::BareManifold;
  SubalgebraEmbedding m_pair;
  Box m_chart, m_base, m_fiber;
  std::optional<MatrixRep> m_rep_h, m_rep_g;
};

/// Bare chart box of dimension dim h for the named pair, side [-radius, radius].
LocalModel bare_model(const std::string& pair_name, double radius = 1.0);
/// U x G with U a cube of the complementary dimension and an exp-chart fiber.
LocalModel principal_model(const std::string& pair_name, double base_radius = 1.0,
                           double fiber_radius = 0.4);

/// Representation of g on R^{dim h} by ad_h of the embedded generators; the
/// matrix picture of how G acts on h-valued form values.
MatrixRep adjoint_rep_on_h(const SubalgebraEmbedding& pair);

} // namespace cartanlab
