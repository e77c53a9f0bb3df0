#pragma once

#include "cartanlab/cartan.hpp"
#include "cartanlab/multilinear.hpp"

namespace cartanlab {

/// A principal G-model together with its enlargement to the full structure
/// group H = exp(h) over the same base.  The enlarged bundle is kept as the
/// product chart U x H; the G-quotient that would identify (u.g, g^-1 a)
/// with (u, a) is never formed, it is checked as a residual instead (see
/// quotient_residual).  The identity section u -> (u, e) embeds the inner
/// chart via (x, t) -> (x, include(t)).
class ExtendedModel {
public:
  const LocalModel& inner() const { return m_inner; }
  const LocalModel& outer() const { return m_outer; }
  const LieAlgebra& h() const { return m_inner.h(); }
  const LieAlgebra& g() const { return m_inner.g(); }

  /// Chart map of the identity section, with its exact constant Jacobian.
  ChartMap section_map() const;

private:
  friend ExtendedModel extend_model(const LocalModel&, double, int, std::uint64_t);
  ExtendedModel(LocalModel inner, LocalModel outer);

  LocalModel m_inner, m_outer;
};

/// Build the U x H model over g_model's base.  Checks that the embedded
/// algebra is bracket-closed in h and that sampled fiber-group elements
/// actually sit inside H: by the defining relation when the name of h tags
/// one (sl* / so* / sp*), by projecting the matrix log onto the span of the
/// ambient representation otherwise.  Throws SubgroupViolation when a sample
/// fails.
ExtendedModel extend_model(const LocalModel& g_model, double fiber_radius = 0.4,
                           int membership_samples = 16, std::uint64_t seed = kDefaultSeed);

/// Principal connection on U x H induced by a generalized Cartan connection
/// on the inner model:
///   omega_(x,s)(xi, sigma) = phi1(ad s) sigma + Ad(exp s)^-1 kappa_(x,0)(xi, 0).
/// The result reproduces every h-generator by construction; equivariance
/// under H follows from kappa's own equivariance and is checked by the
/// returned connection's residuals.
GeneralizedCartanConnection extend_connection(const GeneralizedCartanConnection& conn,
                                              const ExtendedModel& ext);

/// Inverse of extend_connection: pull the connection form back along the
/// identity section.  For a principal connection the round trip reproduces
/// the input; applied to the flat fiber connection it yields the generalized
/// Cartan connection whose kernel is the whole base.
GeneralizedCartanConnection restrict_connection(const GeneralizedCartanConnection& omega,
                                                const ExtendedModel& ext);

/// Residual of the quotient relation underlying extend_connection: the raw
/// two-argument formula evaluated at (u.g, g^-1 a) against its value at
/// (u, a), maximized over samples.  Zero (to the precision of kappa's own
/// equivariance) exactly when the extended form is well defined on the
/// quotient.
double quotient_residual(const GeneralizedCartanConnection& conn, const ExtendedModel& ext,
                         int samples = 32, std::uint64_t seed = kDefaultSeed);

/// Carry a horizontal G-equivariant p-form with values in W over to the
/// enlarged model, twisting by rho(exp s)^-1 for a representation rho of h
/// on W.  Horizontality is required for the result to be independent of the
/// tangent decomposition; violations throw NotHorizontal.
FormField extend_form(const FormField& psi, const ExtendedModel& ext, const MatrixRep& rho);

/// Inverse of extend_form: restriction along the identity section.
FormField restrict_form(const FormField& phi, const ExtendedModel& ext);

enum class RestrictionVerdict { Cartan, NotCartan, NotApplicable };

const char* to_string(RestrictionVerdict verdict);

/// Diagnostic for restricting a principal connection on U x H to the
/// submanifold U x G' picked out by a subalgebra pair g' in h.
struct RestrictionReport {
  RestrictionVerdict verdict = RestrictionVerdict::NotApplicable;
  /// dim(T(U x G') intersect ker omega) at each sample point.
  std::vector<int> intersection_dims;
  /// True when ker omega lies inside T(U x G') at every sample, the shape
  /// of a connection induced from the subgroup.
  bool horizontal_contained = false;
  /// dim U == dim h - dim g', the count needed for a Cartan restriction.
  bool dims_match = false;
};

/// Sample the kernel of omega along the U x G' section.  Verdict is Cartan
/// when the dimensions match and every sampled intersection is zero,
/// NotApplicable when the dimension count already rules it out.
RestrictionReport restriction_report(const GeneralizedCartanConnection& omega,
                                     const SubalgebraEmbedding& pair, int samples = 32,
                                     std::uint64_t seed = kDefaultSeed);

/// Relative residual of d_omega(extend_form(psi)) = extend_form(d_kappa psi)
/// with omega = extend_connection(conn), for a representation rho of h.
double intertwining_residual(const GeneralizedCartanConnection& conn, const ExtendedModel& ext,
                             const FormField& psi, const MatrixRep& rho, int samples = 16,
                             std::uint64_t seed = kDefaultSeed);

/// Relative residual of curvature(extend_connection(conn)) against the
/// extension of curvature(conn) under the adjoint action.
double curvature_correspondence_residual(const GeneralizedCartanConnection& conn,
                                         const ExtendedModel& ext, int samples = 16,
                                         std::uint64_t seed = kDefaultSeed);

/// Largest pointwise difference between the characteristic form of conn on
/// the inner chart and the pullback of the extended connection's
/// characteristic form along the identity section.
double characteristic_transport_residual(const MultilinearFunction& f,
                                         const GeneralizedCartanConnection& conn,
                                         const ExtendedModel& ext, int samples = 16,
                                         std::uint64_t seed = kDefaultSeed);

} // namespace cartanlab
