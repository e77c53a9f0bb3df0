#include "cartanlab/extension.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "cartanlab/chern_weil.hpp"
#include "cartanlab/error.hpp"
#include "cartanlab/matrix_group.hpp"

namespace cartanlab {

namespace {

bool same_chart(const LocalModel& a, const LocalModel& b) {
  return a.kind() == b.kind() && a.chart_dim() == b.chart_dim() &&
         a.h().dim() == b.h().dim() && a.g().dim() == b.g().dim() &&
         (a.chart().lo - b.chart().lo).norm() == 0.0 &&
         (a.chart().hi - b.chart().hi).norm() == 0.0;
}

void check_model(const GeneralizedCartanConnection& conn, const LocalModel& expected,
                 const char* which) {
  require(same_chart(conn.model(), expected), Err::ModelMismatch, which);
}

/// Distance of a sampled fiber-group element from H.  Tagged names get their
/// defining relation; anything else falls back to projecting the matrix log
/// onto the span of the ambient representation.
double membership_residual(const Mat& M, const MatrixRep& rep_h) {
  const std::string& name = rep_h.algebra().name();
  const int d = static_cast<int>(M.rows());
  if (name.starts_with("sl")) return std::abs(M.determinant() - 1.0);
  if (name.starts_with("so")) {
    const double ortho = (M.transpose() * M - Mat::Identity(d, d)).norm();
    return std::max(ortho, std::abs(M.determinant() - 1.0));
  }
  if (name.starts_with("sp") && d % 2 == 0) {
    Mat J = Mat::Zero(d, d);
    J.topRightCorner(d / 2, d / 2).setIdentity();
    J.bottomLeftCorner(d / 2, d / 2) = -Mat::Identity(d / 2, d / 2);
    return (M.transpose() * J * M - J).norm();
  }
  const Mat dev = M - Mat::Identity(d, d);
  if (dev.eigenvalues().cwiseAbs().maxCoeff() >= 1.0) return 1.0;
  double resid = 0.0;
  const Mat L = M.log();
  rep_h.project(L, &resid);
  return resid / (1.0 + L.norm());
}

Mat ad_twist(const LieAlgebra& h, const Vec& s) { return Mat(-h.ad(s)).exp(); }

std::vector<Vec> interior_points(const Box& box, int samples, std::uint64_t seed) {
  return sample_box(box.shrunk(kBoxMargin), samples, seed);
}

} // namespace

ExtendedModel::ExtendedModel(LocalModel inner, LocalModel outer)
    : m_inner(std::move(inner)), m_outer(std::move(outer)) {}

ChartMap ExtendedModel::section_map() const {
  const int m = m_inner.base_dim();
  const int r = m_inner.fiber_dim();
  const int n = h().dim();
  const Mat inc = m_inner.pair().inclusion;
  Mat J = Mat::Zero(m + n, m + r);
  J.topLeftCorner(m, m).setIdentity();
  J.bottomRightCorner(n, r) = inc;
  ChartMap map;
  map.domain = m_inner.chart();
  map.codim = m + n;
  map.eval = [m, n, inc](const Vec& u) {
    Vec w(m + n);
    w << u.head(m), inc * u.tail(u.size() - m);
    return w;
  };
  map.jacobian = [J](const Vec&) { return J; };
  return map;
}

ExtendedModel extend_model(const LocalModel& g_model, double fiber_radius,
                           int membership_samples, std::uint64_t seed) {
  require(g_model.kind() == ModelKind::Principal, Err::InvalidArgument,
          "only principal models extend");
  const SubalgebraEmbedding& pair = g_model.pair();
  const int r = pair.g.dim();
  double closure = 0.0;
  for (int i = 0; i < r; ++i)
    for (int j = i + 1; j < r; ++j) {
      const Vec lhs = pair.include(pair.g.bracket(Vec::Unit(r, i), Vec::Unit(r, j)));
      const Vec rhs = pair.h.bracket(pair.include(Vec::Unit(r, i)), pair.include(Vec::Unit(r, j)));
      closure = std::max(closure, (lhs - rhs).norm());
    }
  require(closure <= 1e-10, Err::NotClosed, "embedded algebra is not closed in h");

  const MatrixRep& rep_h = g_model.ambient_rep();
  for (const Vec& t : interior_points(g_model.fiber(), membership_samples, seed)) {
    const Mat M = group_exp(g_model.group_rep(), t);
    const double resid = membership_residual(M, rep_h);
    require(resid <= 1e-8, Err::SubgroupViolation,
            "sampled fiber element is not in the extension group (residual " +
                std::to_string(resid) + ")");
  }

  SubalgebraEmbedding full{pair.h, pair.h, Mat::Identity(pair.h.dim(), pair.h.dim())};
  LocalModel outer = LocalModel::principal(std::move(full), rep_h, g_model.base(),
                                           Box::cube(pair.h.dim(), fiber_radius));
  return ExtendedModel(g_model, std::move(outer));
}

GeneralizedCartanConnection extend_connection(const GeneralizedCartanConnection& conn,
                                              const ExtendedModel& ext) {
  check_model(conn, ext.inner(), "connection does not live on the inner model");
  const FormField kap = conn.kappa();
  const LieAlgebra h = ext.h();
  const int m = ext.inner().base_dim();
  const int r = ext.inner().fiber_dim();
  const int n = h.dim();
  auto eval = [kap, h, m, r, n](const Vec& w, const std::vector<Vec>& args) {
    const Vec s = w.tail(n);
    Vec u(m + r);
    u << w.head(m), Vec::Zero(r);
    Vec v(m + r);
    v << args.front().head(m), Vec::Zero(r);
    return Vec(phi1(h.ad(s)) * args.front().tail(n) + ad_twist(h, s) * kap.eval(u, {v}));
  };
  FormField omega = FormField::sampled(ext.outer().chart(), 1, n, eval,
                                       kap.derivative_depth());
  return GeneralizedCartanConnection(ext.outer(), std::move(omega));
}

GeneralizedCartanConnection restrict_connection(const GeneralizedCartanConnection& omega,
                                                const ExtendedModel& ext) {
  check_model(omega, ext.outer(), "connection does not live on the extended model");
  return GeneralizedCartanConnection(ext.inner(), pullback(ext.section_map(), omega.kappa()));
}

double quotient_residual(const GeneralizedCartanConnection& conn, const ExtendedModel& ext,
                         int samples, std::uint64_t seed) {
  check_model(conn, ext.inner(), "connection does not live on the inner model");
  const LocalModel& inner = ext.inner();
  const LieAlgebra& h = ext.h();
  const MatrixRep& rep_h = inner.ambient_rep();
  const Mat inc = inner.pair().inclusion;
  const int n = h.dim();
  const int r = inner.fiber_dim();
  const double step = 0.15 * 0.5 * (inner.fiber().hi - inner.fiber().lo).minCoeff();

  RandomStream rng(seed);
  const auto pts = interior_points(inner.chart(), samples, seed);
  const auto fiber_pts = interior_points(ext.outer().fiber(), samples, seed + 1);
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const Vec& u = pts[static_cast<std::size_t>(k)];
    const Vec& s = fiber_pts[static_cast<std::size_t>(k)];
    const Vec xi = rng.vector(inner.chart_dim(), 1.0);
    const Vec Y = rng.vector(n, 1.0);
    const Vec g_step = rng.vector(r, step);

    const Vec base = Y + ad_twist(h, s) * conn.kappa().eval(u, {xi});

    const Vec u2 = inner.right_translate(u, g_step);
    const Mat J = inner.right_translate_differential(u, g_step);
    const Mat moved = group_exp(rep_h, Vec(-(inc * g_step))) * group_exp(rep_h, s);
    const Vec s2 = group_log(rep_h, moved);
    const Vec shifted = Y + ad_twist(h, s2) * conn.kappa().eval(u2, {Vec(J * xi)});

    worst = std::max(worst, (base - shifted).norm());
  }
  return worst;
}

FormField extend_form(const FormField& psi, const ExtendedModel& ext, const MatrixRep& rho) {
  require(rho.algebra().dim() == ext.h().dim(), Err::DimensionMismatch,
          "extension twists by a representation of h");
  require(rho.mat_dim() == psi.target_dim(), Err::DimensionMismatch,
          "representation does not act on the value space of psi");
  require((psi.domain().lo - ext.inner().chart().lo).norm() == 0.0 &&
              (psi.domain().hi - ext.inner().chart().hi).norm() == 0.0,
          Err::ModelMismatch, "form does not live on the inner chart");
  const double scale = sup_norm(psi, interior_points(ext.inner().chart(), 16, kDefaultSeed));
  const double defect = horizontality_residual(ext.inner(), psi, 16, kDefaultSeed);
  require(defect <= 1e-7 * (1.0 + scale), Err::NotHorizontal,
          "only horizontal forms extend");

  const MatrixRep rep = rho;
  const FormField base = psi;
  const int m = ext.inner().base_dim();
  const int r = ext.inner().fiber_dim();
  const int n = ext.h().dim();
  auto eval = [rep, base, m, r, n](const Vec& w, const std::vector<Vec>& args) {
    const Mat twist = Mat(-rep.map(w.tail(n))).exp();
    Vec u(m + r);
    u << w.head(m), Vec::Zero(r);
    std::vector<Vec> inner_args;
    inner_args.reserve(args.size());
    for (const Vec& a : args) {
      Vec v(m + r);
      v << a.head(m), Vec::Zero(r);
      inner_args.push_back(std::move(v));
    }
    return Vec(twist * base.eval(u, inner_args));
  };
  return FormField::sampled(ext.outer().chart(), psi.degree(), psi.target_dim(), eval,
                            psi.derivative_depth());
}

FormField restrict_form(const FormField& phi, const ExtendedModel& ext) {
  require((phi.domain().lo - ext.outer().chart().lo).norm() == 0.0 &&
              (phi.domain().hi - ext.outer().chart().hi).norm() == 0.0,
          Err::ModelMismatch, "form does not live on the extended chart");
  return pullback(ext.section_map(), phi);
}

const char* to_string(RestrictionVerdict verdict) {
  switch (verdict) {
    case RestrictionVerdict::Cartan: return "CARTAN";
    case RestrictionVerdict::NotCartan: return "NOT_CARTAN";
    default: return "NOT_APPLICABLE";
  }
}

RestrictionReport restriction_report(const GeneralizedCartanConnection& omega,
                                     const SubalgebraEmbedding& pair, int samples,
                                     std::uint64_t seed) {
  const LocalModel& model = omega.model();
  require(model.kind() == ModelKind::Principal, Err::ModelMismatch,
          "restriction needs a principal model");
  const int n = model.h().dim();
  require(pair.h.dim() == n && model.fiber_dim() == n, Err::ModelMismatch,
          "subalgebra pair does not match the full structure group");

  const int m = model.base_dim();
  const int rp = pair.g.dim();
  const Mat inc = pair.inclusion;

  RestrictionReport report;
  report.dims_match = (m == n - rp);

  Mat tangent = Mat::Zero(m + n, m + rp);
  tangent.topLeftCorner(m, m).setIdentity();
  tangent.bottomRightCorner(n, rp) = inc;
  const Eigen::HouseholderQR<Mat> tangent_qr(tangent);

  const double half = 0.5 * (model.fiber().hi - model.fiber().lo).minCoeff();
  const double row_sup = inc.cwiseAbs().rowwise().sum().maxCoeff();
  const double t_scale = 0.5 * half / std::max(1.0, row_sup);

  RandomStream rng(seed);
  const auto base_pts = interior_points(model.base(), samples, seed);
  bool contained = true;
  for (const Vec& x : base_pts) {
    Vec w(m + n);
    w << x, inc * rng.vector(rp, t_scale);
    const Mat full = omega.kappa_matrix(w);

    const Mat on_tangent = full * tangent;
    Eigen::JacobiSVD<Mat> svd_t(on_tangent);
    const double top_t = svd_t.singularValues().size() ? svd_t.singularValues()(0) : 0.0;
    const int rank =
        (svd_t.singularValues().array() > 1e-9 * std::max(top_t, 1e-300)).count();
    report.intersection_dims.push_back(m + rp - rank);

    Eigen::JacobiSVD<Mat> svd(full, Eigen::ComputeFullV);
    const double top = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    const int full_rank = (svd.singularValues().array() > 1e-9 * std::max(top, 1e-300)).count();
    for (int c = full_rank; c < m + n; ++c) {
      const Vec kvec = svd.matrixV().col(c);
      const Vec fitted = tangent * tangent_qr.solve(kvec);
      if ((fitted - kvec).norm() > 1e-7 * (1.0 + kvec.norm())) contained = false;
    }
  }
  report.horizontal_contained = contained;

  const bool all_zero = std::all_of(report.intersection_dims.begin(),
                                    report.intersection_dims.end(),
                                    [](int d) { return d == 0; });
  if (!report.dims_match) {
    report.verdict = RestrictionVerdict::NotApplicable;
  } else {
    report.verdict = all_zero ? RestrictionVerdict::Cartan : RestrictionVerdict::NotCartan;
  }
  return report;
}

double intertwining_residual(const GeneralizedCartanConnection& conn, const ExtendedModel& ext,
                             const FormField& psi, const MatrixRep& rho, int samples,
                             std::uint64_t seed) {
  const GeneralizedCartanConnection big = extend_connection(conn, ext);
  const FormField lhs = covariant_derivative(big, rho, extend_form(psi, ext, rho));
  const FormField rhs = extend_form(covariant_derivative(conn, rho, psi), ext, rho);

  RandomStream rng(seed);
  double worst = 0.0;
  double scale = 0.0;
  const int dim = ext.outer().chart_dim();
  for (const Vec& w : interior_points(ext.outer().chart(), samples, seed)) {
    std::vector<Vec> args;
    for (int k = 0; k <= psi.degree(); ++k) args.push_back(rng.vector(dim, 1.0));
    const Vec a = lhs.eval(w, args);
    const Vec b = rhs.eval(w, args);
    worst = std::max(worst, (a - b).norm());
    scale = std::max(scale, b.norm());
  }
  return worst / (1.0 + scale);
}

double curvature_correspondence_residual(const GeneralizedCartanConnection& conn,
                                         const ExtendedModel& ext, int samples,
                                         std::uint64_t seed) {
  const GeneralizedCartanConnection big = extend_connection(conn, ext);
  const FormField lhs = curvature(big);
  const FormField rhs = extend_form(curvature(conn), ext, adjoint_rep(ext.h()));

  RandomStream rng(seed);
  double worst = 0.0;
  double scale = 0.0;
  const int dim = ext.outer().chart_dim();
  for (const Vec& w : interior_points(ext.outer().chart(), samples, seed)) {
    std::vector<Vec> args{rng.vector(dim, 1.0), rng.vector(dim, 1.0)};
    const Vec a = lhs.eval(w, args);
    const Vec b = rhs.eval(w, args);
    worst = std::max(worst, (a - b).norm());
    scale = std::max(scale, b.norm());
  }
  return worst / (1.0 + scale);
}

double characteristic_transport_residual(const MultilinearFunction& f,
                                         const GeneralizedCartanConnection& conn,
                                         const ExtendedModel& ext, int samples,
                                         std::uint64_t seed) {
  const FormField inner_form = chern_weil_form(f, conn);
  const FormField outer_form = chern_weil_form(f, extend_connection(conn, ext));
  const FormField pulled = pullback(ext.section_map(), outer_form);

  RandomStream rng(seed);
  double worst = 0.0;
  const int dim = ext.inner().chart_dim();
  for (const Vec& u : interior_points(ext.inner().chart(), samples, seed)) {
    std::vector<Vec> args;
    for (int k = 0; k < inner_form.degree(); ++k) args.push_back(rng.vector(dim, 1.0));
    worst = std::max(worst, (inner_form.eval(u, args) - pulled.eval(u, args)).norm());
  }
  return worst;
}

} // namespace cartanlab
