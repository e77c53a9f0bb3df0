#pragma once

#include "cartanlab/cartan.hpp"
#include "cartanlab/multilinear.hpp"

namespace cartanlab {

/// Characteristic form f^K = f(K, ..., K) of an arity-k symmetric invariant
/// function: a closed scalar 2k-form, horizontal and G-invariant on
/// principal models.  Throws NotInvariant when f fails ad-invariance.
FormField chern_weil_form(const MultilinearFunction& f,
                          const GeneralizedCartanConnection& conn);

/// Transgression TP with d(TP) = f^{K_1} - f^{K_0} along the straight line
/// kappa_t = kappa_0 + t(kappa_1 - kappa_0):
///   TP = k * integral_0^1 f(kappa_1 - kappa_0, K_t, ..., K_t) dt.
/// The t-integrand is polynomial of degree at most 2k-1, so the fixed
/// 8-node Gauss-Legendre rule is exact through arity 4.
FormField transgression(const MultilinearFunction& f, const GeneralizedCartanConnection& conn0,
                        const GeneralizedCartanConnection& conn1);

} // namespace cartanlab
