#pragma once

#include <functional>
#include <vector>

#include "cartanlab/form_field.hpp"
#include "cartanlab/matrix_group.hpp"
#include "cartanlab/multilinear.hpp"
#include "cartanlab/sampling.hpp"

namespace cartanlab {

/// Smooth curve [0,1] -> chart coordinates carrying its own velocity.
class Path {
public:
  /// c(t) = sum_k coefficients[k] t^k.
  static Path polynomial(std::vector<Vec> coefficients);
  static Path segment(Vec from, Vec to);
  /// Straight segments between consecutive control points, each traversed
  /// with a quintic easing so velocity and acceleration vanish at the
  /// joints and the whole curve is C^2.
  static Path smooth_polyline(std::vector<Vec> control_points);

  int dim() const { return m_dim; }
  Vec point(double t) const { return m_point(t); }
  Vec velocity(double t) const { return m_velocity(t); }
  bool closed() const;

  /// Worst finite-difference mismatch between point() and velocity().
  double consistency_residual(int samples = 32) const;
  bool stays_inside(const Box& box, int samples = 64) const;

private:
  Path() = default;

  int m_dim = 0;
  std::function<Vec(double)> m_point;
  std::function<Vec(double)> m_velocity;
};

enum class MaurerCartanConvention { Left, Right };

/// Sampled sup norm of d kappa -/+ 1/2 [kappa, kappa].  Right selects the
/// + sign, the equation solved by left logarithmic derivatives; Left the
/// - sign, solved by right logarithmic derivatives.
double mc_residual(const FormField& kappa, const LieAlgebra& h, MaurerCartanConvention convention,
                   int samples = 64, std::uint64_t seed = kDefaultSeed);

/// Solution of phi'(t) = phi(t) . rho(kappa(c(t))(c'(t))) at equally spaced
/// parameter nodes, together with the worst step-doubling error estimate.
struct DevelopedPath {
  std::vector<Mat> nodes;
  double max_step_error = 0.0;

  const Mat& endpoint() const { return nodes.back(); }
};

/// Classical fixed-step RK4 with per-step doubling for the error estimate;
/// the two-half-step value is the one propagated.  Group drift is corrected
/// every 64 steps when the representation's algebra carries a recognized
/// defining relation (orthogonal or unimodular).
DevelopedPath develop(const FormField& kappa, const MatrixRep& rep, const Path& path,
                      const Mat& start, int steps = 1024);

/// Worst mismatch between the left logarithmic derivative of the developed
/// nodes (fourth-order stencil) and kappa along the path.
double development_residual(const DevelopedPath& sol, const FormField& kappa,
                            const MatrixRep& rep, const Path& path);

/// Development of a closed loop from the identity.
Mat holonomy(const FormField& kappa, const MatrixRep& rep, const Path& loop, int steps = 1024);

/// The scalar k-form x -> f(kappa(.), ..., kappa(.)) for alternating f.
/// When kappa is flat this turns the algebra cochain differential into the
/// exterior derivative: d flat_pullback(kappa, f) = flat_pullback(kappa, ce_differential(f)).
FormField flat_pullback(const FormField& kappa, const MultilinearFunction& f);

} // namespace cartanlab
