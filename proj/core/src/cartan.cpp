#include "cartanlab/cartan.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "cartanlab/error.hpp"
#include "cartanlab/matrix_group.hpp"
#include "cartanlab/presets.hpp"

namespace cartanlab {

namespace {

std::vector<Vec> interior_points(const LocalModel& model, int samples, std::uint64_t seed) {
  return sample_box(model.chart().shrunk(kBoxMargin), samples, seed);
}

/// [Z1, Z2](u) computed from directional derivatives of the field evaluators.
Vec field_bracket(const std::function<Vec(const Vec&)>& z1,
                  const std::function<Vec(const Vec&)>& z2, const Vec& u, int depth) {
  return directional_derivative(z2, u, z1(u), depth) -
         directional_derivative(z1, u, z2(u), depth);
}

/// Translation vectors small enough to keep exp-chart logs on the principal
/// branch after composing with any point of the fiber box.
double group_step_scale(const LocalModel& model) {
  const Box& f = model.fiber();
  if (f.dim() == 0) return 0.0;
  return 0.15 * 0.5 * (f.hi - f.lo).minCoeff();
}

} // namespace

GeneralizedCartanConnection::GeneralizedCartanConnection(LocalModel model, FormField kappa)
    : m_model(std::move(model)), m_kappa(std::move(kappa)) {
  require(m_kappa.degree() == 1, Err::InvalidArgument, "a connection form has degree one");
  require(m_kappa.chart_dim() == m_model.chart_dim(), Err::ModelMismatch,
          "connection form lives on a different chart");
  require(m_kappa.target_dim() == m_model.h().dim(), Err::DimensionMismatch,
          "connection form must take values in h");
}

double GeneralizedCartanConnection::min_singular_value(int samples, std::uint64_t seed) const {
  double smin = std::numeric_limits<double>::infinity();
  for (const Vec& u : interior_points(m_model, samples, seed)) {
    Eigen::JacobiSVD<Mat> svd(kappa_matrix(u));
    smin = std::min(smin, svd.singularValues().minCoeff());
  }
  return smin;
}

Vec GeneralizedCartanConnection::zeta_at(const Vec& u, const Vec& X) const {
  require(X.size() == m_model.h().dim(), Err::DimensionMismatch,
          "zeta takes an element of h");
  Eigen::JacobiSVD<Mat> svd(kappa_matrix(u), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& sv = svd.singularValues();
  require(sv.minCoeff() > 0 && sv.maxCoeff() / sv.minCoeff() < 1e12, Err::SingularCoframe,
          "connection form is singular at the requested point");
  return svd.solve(X);
}

std::function<Vec(const Vec&)> GeneralizedCartanConnection::zeta(const Vec& X) const {
  return [conn = *this, X](const Vec& u) { return conn.zeta_at(u, X); };
}

Vec GeneralizedCartanConnection::fundamental_at(const Vec& u, const Vec& X) const {
  if (m_model.kind() == ModelKind::Principal) return m_model.fundamental_field(u, X);
  return zeta_at(u, m_model.pair().include(X));
}

double GeneralizedCartanConnection::reproduction_residual(int samples,
                                                          std::uint64_t seed) const {
  const int r = m_model.g().dim();
  double worst = 0.0;
  for (const Vec& u : interior_points(m_model, samples, seed)) {
    for (int j = 0; j < r; ++j) {
      const Vec X = Vec::Unit(r, j);
      const Vec defect =
          m_kappa.eval(u, {fundamental_at(u, X)}) - m_model.pair().include(X);
      worst = std::max(worst, defect.norm());
    }
  }
  return worst;
}

double GeneralizedCartanConnection::equivariance_residual(int samples,
                                                          std::uint64_t seed) const {
  return cartanlab::equivariance_residual(m_model, adjoint_rep_on_h(m_model.pair()), m_kappa,
                                          samples, seed);
}

double GeneralizedCartanConnection::infinitesimal_equivariance_residual(
    int samples, std::uint64_t seed) const {
  const int r = m_model.g().dim();
  const int depth = m_kappa.derivative_depth();
  RandomStream rng(seed);
  double worst = 0.0;
  for (const Vec& u : interior_points(m_model, samples, seed)) {
    for (int j = 0; j < r; ++j) {
      const Vec Y = Vec::Unit(r, j);
      auto Z = [conn = *this, Y](const Vec& y) { return conn.fundamental_at(y, Y); };
      const Mat minus_ad = -m_model.h().ad(m_model.pair().include(Y));
      const Vec v = rng.vector(m_model.chart_dim(), 1.0);
      const Vec transport = directional_derivative(
          [this, &v](const Vec& y) { return m_kappa.eval(y, {v}); }, u, Z(u), depth);
      const Vec lie = transport + m_kappa.eval(u, {directional_derivative(Z, u, v, depth)});
      worst = std::max(worst, (lie - minus_ad * m_kappa.eval(u, {v})).norm());
    }
  }
  return worst;
}

CartanConnection::CartanConnection(LocalModel model, FormField kappa, int samples,
                                   std::uint64_t seed)
    : GeneralizedCartanConnection(std::move(model), std::move(kappa)) {
  require(this->model().chart_dim() == this->model().h().dim(), Err::DimensionMismatch,
          "a Cartan connection needs a chart of dimension dim h");
  m_min_singular = min_singular_value(samples, seed);
  require(m_min_singular > 1e-12, Err::SingularCoframe,
          "connection form is degenerate on the sampled chart");
}

FormField curvature(const GeneralizedCartanConnection& conn) {
  const FormField& k = conn.kappa();
  return exterior_derivative(k) + 0.5 * wedge_bracket(k, k, conn.model().h());
}

double bianchi_residual(const GeneralizedCartanConnection& conn, int samples,
                        std::uint64_t seed) {
  const FormField K = curvature(conn);
  const FormField defect =
      exterior_derivative(K) + wedge_bracket(conn.kappa(), K, conn.model().h());
  const int n = conn.model().chart_dim();
  RandomStream rng(seed);
  double worst = 0.0;
  for (const Vec& u : interior_points(conn.model(), samples, seed)) {
    std::vector<Vec> args;
    for (int k = 0; k < 3; ++k) args.push_back(rng.vector(n, 1.0));
    worst = std::max(worst, defect.eval(u, args).norm());
  }
  return worst;
}

double horizontality_residual(const GeneralizedCartanConnection& conn, const FormField& psi,
                              int samples, std::uint64_t seed) {
  const int p = psi.degree();
  if (p == 0) return 0.0;
  const int r = conn.model().g().dim();
  const int n = conn.model().chart_dim();
  RandomStream rng(seed);
  double worst = 0.0;
  for (const Vec& u : interior_points(conn.model(), samples, seed)) {
    for (int j = 0; j < r; ++j) {
      std::vector<Vec> args{conn.fundamental_at(u, Vec::Unit(r, j))};
      for (int k = 1; k < p; ++k) args.push_back(rng.vector(n, 1.0));
      worst = std::max(worst, psi.eval(u, args).norm());
    }
  }
  return worst;
}

double horizontality_residual(const LocalModel& model, const FormField& psi, int samples,
                              std::uint64_t seed) {
  require(model.kind() == ModelKind::Principal, Err::ModelMismatch,
          "vertical directions need a principal model");
  const int p = psi.degree();
  if (p == 0) return 0.0;
  const int r = model.g().dim();
  const int n = model.chart_dim();
  RandomStream rng(seed);
  double worst = 0.0;
  for (const Vec& u : interior_points(model, samples, seed)) {
    for (int j = 0; j < r; ++j) {
      std::vector<Vec> args{model.fundamental_field(u, Vec::Unit(r, j))};
      for (int k = 1; k < p; ++k) args.push_back(rng.vector(n, 1.0));
      worst = std::max(worst, psi.eval(u, args).norm());
    }
  }
  return worst;
}

FormField covariant_derivative(const GeneralizedCartanConnection& conn, const MatrixRep& rho,
                               const FormField& psi) {
  require(rho.algebra().dim() == conn.model().h().dim(), Err::DimensionMismatch,
          "covariant derivative expects a representation of h");
  require(rho.mat_dim() == psi.target_dim(), Err::DimensionMismatch,
          "representation does not act on the value space of psi");
  const double scale = sup_norm(psi, interior_points(conn.model(), 16, kDefaultSeed));
  const double defect = horizontality_residual(conn, psi, 16, kDefaultSeed);
  require(defect <= 1e-7 * (1.0 + scale), Err::NotHorizontal,
          "covariant derivative needs a horizontal form");
  return exterior_derivative(psi) + rho_wedge(conn.kappa(), rho, psi);
}

double equivariance_residual(const LocalModel& model, const MatrixRep& rho_g,
                             const FormField& psi, int samples, std::uint64_t seed) {
  require(model.kind() == ModelKind::Principal, Err::ModelMismatch,
          "equivariance needs a structure group action");
  require(rho_g.algebra().dim() == model.g().dim(), Err::DimensionMismatch,
          "value representation must belong to g");
  require(rho_g.mat_dim() == psi.target_dim(), Err::DimensionMismatch,
          "value representation does not act on the value space");
  const int p = psi.degree();
  const int n = model.chart_dim();
  const double step = group_step_scale(model);
  RandomStream rng(seed);
  double worst = 0.0;
  for (const Vec& u : interior_points(model, samples, seed)) {
    const Vec s = rng.vector(model.g().dim(), step);
    const Vec moved = model.right_translate(u, s);
    const Mat J = model.right_translate_differential(u, s);
    const Mat twist = Mat(-rho_g.map(s)).exp();
    std::vector<Vec> args, moved_args;
    for (int k = 0; k < p; ++k) {
      args.push_back(rng.vector(n, 1.0));
      moved_args.push_back(J * args.back());
    }
    worst = std::max(worst, (psi.eval(moved, moved_args) - twist * psi.eval(u, args)).norm());
  }
  return worst;
}

CurvatureFunction::CurvatureFunction(CartanConnection conn)
    : m_conn(std::move(conn)), m_curv(curvature(m_conn)) {}

std::vector<Mat> CurvatureFunction::at(const Vec& u) const {
  const int n = m_conn.model().h().dim();
  std::vector<Vec> frame;
  for (int i = 0; i < n; ++i) frame.push_back(m_conn.zeta_at(u, Vec::Unit(n, i)));
  std::vector<Mat> comp(n, Mat::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Vec val = m_curv.eval(u, {frame[i], frame[j]});
      for (int k = 0; k < n; ++k) {
        comp[k](i, j) = val[k];
        comp[k](j, i) = -val[k];
      }
    }
  return comp;
}

double CurvatureFunction::antisymmetry_residual(int samples, std::uint64_t seed) const {
  const int n = m_conn.model().h().dim();
  double worst = 0.0;
  for (const Vec& u : interior_points(m_conn.model(), samples, seed)) {
    std::vector<Vec> frame;
    for (int i = 0; i < n; ++i) frame.push_back(m_conn.zeta_at(u, Vec::Unit(n, i)));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        worst = std::max(worst, (m_curv.eval(u, {frame[i], frame[j]}) +
                                 m_curv.eval(u, {frame[j], frame[i]}))
                                    .norm());
  }
  return worst;
}

double CurvatureFunction::constancy_residual(int samples, std::uint64_t seed) const {
  std::vector<std::vector<Mat>> tensors;
  for (const Vec& u : interior_points(m_conn.model(), samples, seed)) tensors.push_back(at(u));
  double worst = 0.0;
  for (std::size_t a = 0; a < tensors.size(); ++a)
    for (std::size_t b = a + 1; b < tensors.size(); ++b)
      for (std::size_t k = 0; k < tensors[a].size(); ++k)
        worst = std::max(worst, (tensors[a][k] - tensors[b][k]).cwiseAbs().maxCoeff());
  return worst;
}

CurvatureFunction curvature_function(const CartanConnection& conn) {
  return CurvatureFunction(conn);
}

std::pair<FormField, FormField> reductive_split(const GeneralizedCartanConnection& conn,
                                                const Mat& complement_basis) {
  const SubalgebraEmbedding& pair = conn.model().pair();
  const int n = pair.h.dim();
  const int r = pair.g.dim();
  const int m = n - r;
  require(complement_basis.rows() == n && complement_basis.cols() == m, Err::DimensionMismatch,
          "complement basis must be dim h by dim h - dim g");

  Mat frame(n, n);
  frame.leftCols(m) = complement_basis;
  frame.rightCols(r) = pair.inclusion;
  Eigen::FullPivLU<Mat> lu(frame);
  require(lu.isInvertible(), Err::InvalidArgument,
          "complement and g together must span h");

  const auto solver = complement_basis.colPivHouseholderQr();
  for (int j = 0; j < r; ++j) {
    const Vec Y = pair.include(Vec::Unit(r, j));
    for (int c = 0; c < m; ++c) {
      const Vec w = pair.h.bracket(Y, complement_basis.col(c));
      const double off = (w - complement_basis * solver.solve(w)).norm();
      require(off <= 1e-9 * (1.0 + w.norm()), Err::NotReductive,
              "complement is not invariant under the g action");
    }
  }

  const Mat inv = lu.inverse();
  return {postcompose(inv.topRows(m), conn.kappa()),
          postcompose(inv.bottomRows(r), conn.kappa())};
}

GeneralizedCartanConnection make_principal_cartan(const LocalModel& model,
                                                  std::function<Mat(const Vec&)> A) {
  require(model.kind() == ModelKind::Principal, Err::ModelMismatch,
          "principal connection ansatz needs a principal model");
  const int m = model.base_dim();
  const int r = model.fiber_dim();
  {
    const Mat probe = A(Vec::Zero(m));
    require(probe.rows() == model.h().dim() && probe.cols() == m, Err::DimensionMismatch,
            "horizontal coefficient must map base velocities into h");
  }
  auto eval = [mod = model, A = std::move(A), m, r](const Vec& u, const std::vector<Vec>& args) {
    const Vec& w = args.front();
    const Vec t = mod.fiber_part(u);
    const Vec horizontal = mod.ad_inverse_on_h(t) * (A(mod.base_part(u)) * w.head(m));
    const Vec vertical = mod.pair().include(phi1(mod.g().ad(t)) * w.tail(r));
    return Vec(horizontal + vertical);
  };
  FormField kappa =
      FormField::sampled(model.chart(), 1, model.h().dim(), std::move(eval));
  return GeneralizedCartanConnection(model, std::move(kappa));
}

CartanConnection maurer_cartan(const std::string& pair_name, double radius) {
  LocalModel model = bare_model(pair_name, radius);
  const LieAlgebra& h = model.h();
  auto eval = [h](const Vec& u, const std::vector<Vec>& args) {
    return Vec(phi1(h.ad(u)) * args.front());
  };
  FormField kappa = FormField::sampled(model.chart(), 1, h.dim(), std::move(eval));
  return CartanConnection(std::move(model), std::move(kappa));
}

double bracket_axiom_residual(const CartanConnection& conn, int samples, std::uint64_t seed) {
  const LieAlgebra& h = conn.model().h();
  const int r = conn.model().g().dim();
  const int depth = conn.kappa().derivative_depth();
  RandomStream rng(seed);
  double worst = 0.0;
  for (const Vec& u : interior_points(conn.model(), samples, seed)) {
    const Vec X = rng.vector(h.dim(), 1.0);
    const Vec Y = rng.vector(r, 1.0);
    auto ZX = conn.zeta(X);
    auto ZY = [c = conn, Y](const Vec& y) { return c.fundamental_at(y, Y); };
    const Vec lhs = field_bracket(ZX, ZY, u, depth);
    const Vec rhs = conn.zeta_at(u, h.bracket(X, conn.model().pair().include(Y)));
    worst = std::max(worst, (lhs - rhs).norm());
  }
  return worst;
}

double bracket_defect_residual(const CartanConnection& conn, int samples, std::uint64_t seed) {
  const LieAlgebra& h = conn.model().h();
  const FormField K = curvature(conn);
  const int depth = conn.kappa().derivative_depth();
  RandomStream rng(seed);
  double worst = 0.0;
  for (const Vec& u : interior_points(conn.model(), samples, seed)) {
    const Vec X = rng.vector(h.dim(), 1.0);
    const Vec Y = rng.vector(h.dim(), 1.0);
    auto ZX = conn.zeta(X);
    auto ZY = conn.zeta(Y);
    const Vec lhs = conn.zeta_at(u, K.eval(u, {ZX(u), ZY(u)}));
    const Vec rhs = conn.zeta_at(u, h.bracket(X, Y)) - field_bracket(ZX, ZY, u, depth);
    worst = std::max(worst, (lhs - rhs).norm());
  }
  return worst;
}

} // namespace cartanlab
