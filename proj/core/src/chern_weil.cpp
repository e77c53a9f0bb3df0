#include "cartanlab/chern_weil.hpp"

#include <array>
#include <optional>

#include "cartanlab/error.hpp"

namespace cartanlab {

namespace {

struct QuadratureNode {
  double t;
  double w;
};

/// 8-node Gauss-Legendre rule mapped from [-1, 1] to [0, 1].
std::array<QuadratureNode, 8> unit_interval_rule() {
  static constexpr double x[4] = {0.1834346424956498, 0.5255324099163290,
                                  0.7966664774136267, 0.9602898564975363};
  static constexpr double w[4] = {0.3626837833783620, 0.3137066458778873,
                                  0.2223810344533745, 0.1012285362903763};
  std::array<QuadratureNode, 8> rule{};
  for (int i = 0; i < 4; ++i) {
    rule[2 * i] = {0.5 * (1.0 - x[i]), 0.5 * w[i]};
    rule[2 * i + 1] = {0.5 * (1.0 + x[i]), 0.5 * w[i]};
  }
  return rule;
}

void check_invariant_input(const MultilinearFunction& f,
                           const GeneralizedCartanConnection& conn) {
  const LieAlgebra& h = conn.model().h();
  require(f.dim() == h.dim(), Err::DimensionMismatch,
          "invariant function must live on h");
  require(f.arity() == 1 || f.symmetry() == Symmetry::Symmetric, Err::InvalidArgument,
          "characteristic forms need a symmetric function");
  const double residual = invariance_residual(h, f);
  require(residual <= 1e-8 * (1.0 + f.max_abs_coefficient()), Err::NotInvariant,
          "function is not ad-invariant");
}

void check_same_model(const LocalModel& a, const LocalModel& b) {
  const bool same = a.kind() == b.kind() && a.chart_dim() == b.chart_dim() &&
                    a.h().dim() == b.h().dim() && a.g().dim() == b.g().dim() &&
                    (a.chart().lo - b.chart().lo).norm() == 0.0 &&
                    (a.chart().hi - b.chart().hi).norm() == 0.0;
  require(same, Err::ModelMismatch, "connections live on different local models");
}

} // namespace

FormField chern_weil_form(const MultilinearFunction& f,
                          const GeneralizedCartanConnection& conn) {
  check_invariant_input(f, conn);
  const FormField K = curvature(conn);
  return apply_multilinear(f, std::vector<FormField>(f.arity(), K));
}

FormField transgression(const MultilinearFunction& f, const GeneralizedCartanConnection& conn0,
                        const GeneralizedCartanConnection& conn1) {
  check_invariant_input(f, conn0);
  check_same_model(conn0.model(), conn1.model());
  const LieAlgebra& h = conn0.model().h();
  const int k = f.arity();

  const FormField alpha = conn1.kappa() - conn0.kappa();
  std::optional<FormField> total;
  for (const QuadratureNode& node : unit_interval_rule()) {
    const FormField kt = conn0.kappa() + node.t * alpha;
    const FormField Kt = exterior_derivative(kt) + 0.5 * wedge_bracket(kt, kt, h);
    std::vector<FormField> slots(static_cast<std::size_t>(k), Kt);
    slots[0] = alpha;
    const FormField term = (k * node.w) * apply_multilinear(f, slots);
    total = total ? *total + term : term;
  }
  return *total;
}

} // namespace cartanlab
