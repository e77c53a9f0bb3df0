#include "suites.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "cartanlab/cartan.hpp"
#include "cartanlab/chern_weil.hpp"
#include "cartanlab/developing.hpp"
#include "cartanlab/error.hpp"
#include "cartanlab/extension.hpp"
#include "cartanlab/jets.hpp"
#include "cartanlab/presets.hpp"
#include "cartanlab/prolongation.hpp"
#include "cartanlab/sampling.hpp"

namespace cartanlab::cli {

namespace {

Json matrix_to_json(const Mat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string dashed(std::string pair_name) {
  std::replace(pair_name.begin(), pair_name.end(), '/', '-');
  return pair_name;
}

std::string pair_h(const std::string& pair_name) {
  return pair_name.substr(0, pair_name.find('/'));
}

struct ConnectionPresetDef {
  std::string name;
  std::string pair;
  bool principal = false;
};

const std::vector<ConnectionPresetDef>& connection_presets() {
  static const std::vector<ConnectionPresetDef> defs = [] {
    std::vector<ConnectionPresetDef> out;
    for (const auto& pair : pair_preset_names())
      out.push_back({dashed(pair) + "-mc", pair, false});
    std::vector<std::string> seen;
    for (const auto& pair : pair_preset_names()) {
      const std::string h = pair_h(pair);
      if (std::find(seen.begin(), seen.end(), h) != seen.end()) continue;
      seen.push_back(h);
      out.push_back({h + "-mc", pair, false});
    }
    for (const auto& pair : pair_preset_names())
      out.push_back({dashed(pair) + "-principal", pair, true});
    return out;
  }();
  return defs;
}

const ConnectionPresetDef* find_connection_preset(const std::string& name) {
  for (const auto& def : connection_presets())
    if (def.name == name) return &def;
  return nullptr;
}

/// Orthonormal basis of the complement of the embedded isotropy algebra,
/// the constant coframe block of the built-in principal presets.
Mat isotropy_complement(const SubalgebraEmbedding& pair) {
  Eigen::JacobiSVD<Mat> svd(pair.inclusion, Eigen::ComputeFullU);
  const int base_dim = pair.h.dim() - pair.g.dim();
  return svd.matrixU().rightCols(base_dim);
}

struct ConnectionSubject {
  GeneralizedCartanConnection conn;
  std::string pair_name;  // empty for inline configs
  bool expect_flat = false;
};

ConnectionSubject build_connection_preset(const ConnectionPresetDef& def) {
  if (!def.principal) {
    CartanConnection mc = maurer_cartan(def.pair);
    return {GeneralizedCartanConnection(mc.model(), mc.kappa()), def.pair, true};
  }
  LocalModel model = principal_model(def.pair, 1.0, 0.3);
  const Mat block = isotropy_complement(model.pair());
  GeneralizedCartanConnection conn =
      make_principal_cartan(model, [block](const Vec&) { return block; });
  return {std::move(conn), def.pair, false};
}

ConnectionSubject resolve_connection(const std::string& subject, const Json* config) {
  if (config == nullptr) {
    const ConnectionPresetDef* def = find_connection_preset(subject);
    if (def == nullptr)
      fail(Err::UnknownPreset, "unknown connection preset \"" + subject + "\"");
    return build_connection_preset(*def);
  }
  ConnectionSubject out{parse_connection(*config), "", false};
  if (config->contains("model") && (*config)["model"].contains("pair"))
    out.pair_name = (*config)["model"]["pair"].get<std::string>();
  if (config->contains("expect_flat")) {
    const Json& flag = (*config)["expect_flat"];
    if (!flag.is_boolean()) fail(Err::ConfigError, "\"expect_flat\" must be a boolean");
    out.expect_flat = flag.get<bool>();
  }
  if (config->contains("kappa") && (*config)["kappa"].is_string())
    out.expect_flat = true; // the maurer-cartan shorthand
  return out;
}

/// Matrix group the development integrates in: the defining representation
/// of a named pair, the ambient one on inline principal models, otherwise
/// the adjoint.
MatrixRep development_rep(const ConnectionSubject& cs, const Json* config) {
  if (config != nullptr && config->contains("rep")) {
    const Json& rep = (*config)["rep"];
    if (!rep.is_string()) fail(Err::ConfigError, "\"rep\" must be a preset name");
    return rep_preset(rep.get<std::string>());
  }
  if (!cs.pair_name.empty()) return rep_preset(pair_h(cs.pair_name));
  if (cs.conn.model().kind() == ModelKind::Principal) return cs.conn.model().ambient_rep();
  return adjoint_rep(cs.conn.model().h());
}

MatrixRep trivial_rep(const LieAlgebra& g) {
  return MatrixRep(g, std::vector<Mat>(static_cast<std::size_t>(g.dim()), Mat::Zero(1, 1)));
}

struct GStructurePresetDef {
  std::string name;
  LocalGStructure (*build)();
};

LocalGStructure stretched_so2() {
  const int n = 2;
  std::vector<std::vector<Polynomial>> frame(
      2, std::vector<Polynomial>(2, Polynomial(n)));
  frame[0][0] = Polynomial::constant(n, 1.0) + Polynomial::variable(n, 1) * 0.2;
  frame[1][1] = Polynomial::constant(n, 1.0) - Polynomial::variable(n, 0) * 0.2;
  return LocalGStructure(LinearLieAlgebra::from_rep(rep_preset("so2")),
                         Box::cube(n, 0.8), std::move(frame));
}

const std::vector<GStructurePresetDef>& gstructure_presets() {
  static const std::vector<GStructurePresetDef> defs = {
      {"so2-flat",
       [] { return LocalGStructure::flat(LinearLieAlgebra::from_rep(rep_preset("so2")), 0.8); }},
      {"so2-stretched", [] { return stretched_so2(); }},
      {"co3-flat",
       [] { return LocalGStructure::flat(LinearLieAlgebra::from_rep(rep_preset("co3")), 0.8); }},
      {"gl2-flat",
       [] { return LocalGStructure::flat(LinearLieAlgebra::from_rep(rep_preset("gl2")), 0.8); }},
      {"trivial2-flat",
       [] { return LocalGStructure::flat(LinearLieAlgebra(2, {}, "trivial"), 0.8); }},
  };
  return defs;
}

LocalGStructure resolve_gstructure(const std::string& subject, const Json* config) {
  if (config != nullptr) return parse_gstructure(*config);
  for (const auto& def : gstructure_presets())
    if (def.name == subject) return def.build();
  fail(Err::UnknownPreset, "unknown structure preset \"" + subject + "\"");
}

Report make_report(const char* suite, const std::string& subject, const SuiteOptions& opt) {
  Report r;
  r.suite = suite;
  r.subject = subject;
  r.seed = opt.seed;
  r.samples = opt.samples;
  r.tol_scale = opt.tol_scale;
  return r;
}

double identity_distance(const Mat& m) {
  return (m - Mat::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
}

} // namespace

bool is_builtin_connection(const std::string& name) {
  return find_connection_preset(name) != nullptr;
}

bool is_builtin_gstructure(const std::string& name) {
  for (const auto& def : gstructure_presets())
    if (def.name == name) return true;
  return false;
}

Json preset_catalog() {
  Json out;
  Json conns = Json::array();
  for (const auto& def : connection_presets()) {
    Json e;
    e["name"] = def.name;
    e["pair"] = def.pair;
    e["kind"] = def.principal ? "principal" : "maurer-cartan";
    conns.push_back(std::move(e));
  }
  out["connections"] = std::move(conns);

  Json structures = Json::array();
  for (const auto& def : gstructure_presets()) {
    LocalGStructure s = def.build();
    Json e;
    e["name"] = def.name;
    e["group"] = s.group().name();
    e["v_dim"] = s.dim();
    structures.push_back(std::move(e));
  }
  out["gstructures"] = std::move(structures);

  Json algebras = Json::array();
  for (const auto& name : algebra_preset_names()) {
    Json e;
    e["name"] = name;
    e["dim"] = algebra_preset(name).dim();
    algebras.push_back(std::move(e));
  }
  out["algebras"] = std::move(algebras);

  Json pairs = Json::array();
  for (const auto& name : pair_preset_names()) {
    SubalgebraEmbedding pair = pair_preset(name);
    Json e;
    e["name"] = name;
    e["dim_h"] = pair.h.dim();
    e["dim_g"] = pair.g.dim();
    pairs.push_back(std::move(e));
  }
  out["pairs"] = std::move(pairs);

  Json user = Json::array();
  for (const auto& name : user_preset_names()) user.push_back(name);
  out["user"] = std::move(user);
  return out;
}

Report run_check(const std::string& subject, const Json* config, const SuiteOptions& opt) {
  Report r = make_report("check", subject, opt);
  ConnectionSubject cs = resolve_connection(subject, config);
  const GeneralizedCartanConnection& conn = cs.conn;
  const bool principal = conn.model().kind() == ModelKind::Principal;

  const double msv = conn.min_singular_value(opt.samples, opt.seed);
  r.data["min_singular"] = msv;
  r.add("coframe_floor", "smallest singular value of the coefficient matrix stays above 1e-8",
        std::max(0.0, 1e-8 - msv), 1e-9);
  r.add("reproduction", "kappa returns the generator on fundamental fields",
        conn.reproduction_residual(opt.samples, opt.seed), 1e-8);
  if (principal) {
    r.add("equivariance", "right translation conjugates kappa by the adjoint",
          conn.equivariance_residual(opt.samples, opt.seed), 1e-7);
    r.add("infinitesimal_equivariance", "Lie derivative along fundamental fields is -ad",
          conn.infinitesimal_equivariance_residual(opt.samples, opt.seed), 1e-5);
  }

  const FormField K = curvature(conn);
  const auto pts = sample_box(conn.model().chart(), opt.samples, opt.seed);
  const double curvature_sup = sup_norm(K, pts);
  r.data["curvature_sup"] = curvature_sup;
  r.add("bianchi", "dK equals the bracket of kappa with K",
        bianchi_residual(conn, std::min(opt.samples, 32), opt.seed), 1e-5);
  if (principal)
    r.add("curvature_horizontality", "K vanishes on vertical directions",
          horizontality_residual(conn, K, opt.samples, opt.seed), 1e-6);

  if (msv > 1e-8) {
    CartanConnection strong(conn.model(), conn.kappa(), opt.samples, opt.seed);
    // With g = h the axiom collapses into a flatness assertion, which the
    // flatness line owns; a curved parallelism is not a defect.
    if (conn.model().g().dim() < conn.model().h().dim())
      r.add("bracket_axiom", "constant fields bracket like the algebra against the isotropy",
            bracket_axiom_residual(strong, std::min(opt.samples, 32), opt.seed), 1e-5);
    r.add("bracket_defect", "curvature accounts for the full bracket defect",
          bracket_defect_residual(strong, std::min(opt.samples, 32), opt.seed), 1e-4);
  }
  if (cs.expect_flat)
    r.add("flatness", "the parallelism satisfies the structure equation exactly",
          curvature_sup, 1e-8);
  return r;
}

Report run_develop(const std::string& subject, const Json* config, const SuiteOptions& opt) {
  Report r = make_report("develop", subject, opt);
  ConnectionSubject cs = resolve_connection(subject, config);
  const MatrixRep rep = development_rep(cs, config);

  // The default loop is polynomial, hence analytic: the log derivative
  // diagnostic differentiates the development nodes with a fourth order
  // stencil and only earns its accuracy on smooth data.
  Path path = [&] {
    if (config != nullptr && config->contains("path"))
      return parse_path((*config)["path"], cs.conn.model().chart_dim());
    const Box& chart = cs.conn.model().chart();
    RandomStream rng(opt.seed);
    const double r = chart.hi[0];
    const Vec c0 = rng.vector(chart.dim(), 0.20 * r);
    const Vec c1 = rng.vector(chart.dim(), 0.15 * r);
    const Vec c2 = rng.vector(chart.dim(), 0.15 * r);
    return Path::polynomial({c0, c1, c2, Vec(-c1 - c2)});
  }();

  r.add("path_consistency", "the path velocity matches finite differences of its points",
        path.consistency_residual(64), 1e-5);

  const int n = rep.mat_dim();
  DevelopedPath sol = develop(cs.conn.kappa(), rep, path, Mat::Identity(n, n), opt.steps);
  r.add("integration_error", "step doubling estimate of the integrator error",
        sol.max_step_error, 1e-9);
  r.add("log_derivative_match",
        "the left logarithmic derivative of the development reproduces kappa",
        development_residual(sol, cs.conn.kappa(), rep, path), 1e-3);
  if (path.closed() && cs.expect_flat)
    r.add("holonomy_trivial", "a flat parallelism develops closed loops to the identity",
          identity_distance(sol.endpoint()), 1e-6);

  r.data["steps"] = opt.steps;
  r.data["closed_path"] = path.closed();
  r.data["endpoint"] = matrix_to_json(sol.endpoint());
  return r;
}

Report run_chern_weil(const std::string& subject, const Json* config, const SuiteOptions& opt) {
  Report r = make_report("chern-weil", subject, opt);
  ConnectionSubject cs = resolve_connection(subject, config);
  const LocalModel& model = cs.conn.model();
  const MatrixRep rep = development_rep(cs, config);

  const MultilinearFunction f =
      (config != nullptr && config->contains("invariant"))
          ? parse_invariant((*config)["invariant"], model.h(), rep)
          : trace_power_form(rep, opt.power);
  const double inv = invariance_residual(model.h(), f);
  r.add("invariance", "the symmetric function is invariant under ad", inv, 1e-10);
  if (inv > 1e-8) return r;

  const auto pts = sample_box(model.chart(), opt.samples, opt.seed);
  // Each probe of a derivative sup costs a stencil of nested curvature
  // evaluations, and the tuple count grows with the chart dimension.  The
  // residuals are pointwise identities, so a handful of probes pins them.
  const auto dpts = model.chart_dim() >= 5
                        ? sample_box(model.chart(), std::min(opt.samples, 6), opt.seed)
                        : pts;
  const FormField cw0 = chern_weil_form(f, cs.conn);
  const double scale0 = 1.0 + sup_norm(cw0, pts);
  r.add("closedness", "the characteristic form is closed",
        sup_norm(exterior_derivative(cw0), dpts) / scale0, 1e-5);
  if (model.kind() == ModelKind::Principal) {
    r.add("horizontality", "the characteristic form kills vertical directions",
          horizontality_residual(cs.conn, cw0, opt.samples, opt.seed) / scale0, 1e-6);
    r.add("fiber_invariance", "the characteristic form descends to the base",
          equivariance_residual(model, trivial_rep(model.g()), cw0,
                                std::min(opt.samples, 16), opt.seed) / scale0,
          1e-6);
  }

  // Second connection on the same model, shifted by a small polynomial form.
  const int dim_h = model.h().dim();
  const int n = model.chart_dim();
  RandomStream rng(opt.seed ^ 0x9E3779B97F4A7C15ull);
  FormField::Coefficients coef;
  for (int i = 0; i < n; ++i) {
    std::vector<Polynomial> column(static_cast<std::size_t>(dim_h), Polynomial(n));
    for (int k = 0; k < dim_h; ++k) {
      Polynomial p = Polynomial::constant(n, rng.uniform(-0.05, 0.05));
      for (int v = 0; v < n; ++v) p += Polynomial::variable(n, v) * rng.uniform(-0.05, 0.05);
      column[static_cast<std::size_t>(k)] = p;
    }
    coef[{i}] = std::move(column);
  }
  const FormField shift = FormField::poly(model.chart(), 1, dim_h, std::move(coef));
  const GeneralizedCartanConnection conn1(model, cs.conn.kappa() + shift);

  const FormField cw1 = chern_weil_form(f, conn1);
  const double scale1 = 1.0 + sup_norm(cw1, pts);
  r.add("closedness_shifted", "the shifted connection's characteristic form is closed",
        sup_norm(exterior_derivative(cw1), dpts) / scale1, 1e-5);
  const FormField tp = transgression(f, cs.conn, conn1);
  r.add("transgression", "d of the transgression form matches the difference",
        sup_norm(cw1 - cw0 - exterior_derivative(tp), dpts) / (scale0 + scale1 - 1.0), 1e-4);
  r.data["form_degree"] = cw0.degree();
  r.data["chart_dim"] = model.chart_dim();
  r.data["characteristic_sup"] = scale0 - 1.0;
  r.data["shifted_characteristic_sup"] = scale1 - 1.0;
  return r;
}

Report run_extend(const std::string& subject, const Json* config, const SuiteOptions& opt) {
  Report r = make_report("extend", subject, opt);
  ConnectionSubject cs = resolve_connection(subject, config);
  const LocalModel& model = cs.conn.model();
  if (model.kind() != ModelKind::Principal)
    fail(Err::ConfigError, "extension needs a principal model; pick a -principal preset");

  const ExtendedModel ext = extend_model(model, 0.25, 16, opt.seed);
  const GeneralizedCartanConnection omega = extend_connection(cs.conn, ext);

  r.add("quotient", "the extended form is constant on gauge orbits",
        quotient_residual(cs.conn, ext, opt.samples, opt.seed), 1e-6);

  const GeneralizedCartanConnection back = restrict_connection(omega, ext);
  const auto pts = sample_box(model.chart(), opt.samples, opt.seed);
  r.add("roundtrip", "restricting the extension returns the original connection",
        sup_norm(back.kappa() - cs.conn.kappa(), pts), 1e-8);
  r.add("extended_reproduction", "the extension reproduces every generator of the full algebra",
        omega.reproduction_residual(opt.samples, opt.seed), 1e-7);
  r.add("extended_equivariance", "the extension is equivariant under the full group",
        omega.equivariance_residual(std::min(opt.samples, 16), opt.seed), 1e-5);

  r.add("curvature_transport", "extension carries curvature to curvature",
        curvature_correspondence_residual(cs.conn, ext, std::min(opt.samples, 10), opt.seed),
        1e-5);

  // The intertwining witness is the coframe projected onto the orthogonal
  // complement of the isotropy.  That form is equivariant only when the
  // complement is ad-invariant, so non-reductive pairs skip this line.
  const Mat comp = isotropy_complement(model.pair());
  bool reductive = true;
  try {
    reductive_split(cs.conn, comp);
  } catch (const Error& e) {
    if (e.code() != Err::NotReductive) throw;
    reductive = false;
  }
  if (reductive) {
    const int base_dim = model.base_dim();
    Mat frame(model.h().dim(), model.h().dim());
    frame << comp, model.pair().inclusion;
    const Mat project = comp * frame.inverse().topRows(base_dim);
    const FormField psi = postcompose(project, cs.conn.kappa());
    const MatrixRep rho = adjoint_rep(ext.h());
    r.add("intertwining", "the covariant derivative commutes with the extension",
          intertwining_residual(cs.conn, ext, psi, rho, std::min(opt.samples, 10), opt.seed),
          1e-5);
  } else {
    r.data["intertwining"] = "skipped: the isotropy admits no invariant complement";
  }
  const MultilinearFunction f = trace_power_form(model.ambient_rep(), 2);
  if (invariance_residual(model.h(), f) <= 1e-8)
    r.add("characteristic_transport",
          "characteristic forms agree on the section of the enlarged bundle",
          characteristic_transport_residual(f, cs.conn, ext, std::min(opt.samples, 10),
                                            opt.seed),
          1e-6);

  const RestrictionReport rr = restriction_report(omega, model.pair(),
                                                  std::min(opt.samples, 16), opt.seed);
  r.data["restriction_verdict"] = to_string(rr.verdict);
  r.data["restriction_dims_match"] = rr.dims_match;
  r.data["horizontal_contained"] = rr.horizontal_contained;
  return r;
}

Report run_prolong(const std::string& subject, const Json* config, const SuiteOptions& opt) {
  Report r = make_report("prolong", subject, opt);
  const ProlongRequest req =
      config != nullptr
          ? parse_prolong_request(*config)
          : ProlongRequest{parse_linear_group(Json(subject)), opt.k_max, opt.strict};
  const LinearLieAlgebra& g = req.group;

  r.add("closure", "the matrix span closes under commutators", g.closure_residual(), 1e-10);
  const ProlongationTable table = prolong(g, req.k_max);

  double margin = 0.0;
  for (const auto& level : table.levels)
    if (std::isfinite(level.gap_ratio) && level.gap_ratio > 0.0)
      margin = std::max(margin, 1.0 / level.gap_ratio);
  r.add("rank_margin", "singular value gaps cleanly separate kernels from ranges",
        margin, 1e-5);

  const TorsionSplit split = torsion_complement(g, false, opt.samples, opt.seed);
  if (req.strict_invariance)
    r.add("complement_invariance", "the torsion complement is preserved by the group",
          split.invariance_leakage, 1e-6);

  const CurvatureSplitting cw = curvature_splitting(g);
  r.add("splitting_consistency", "the level one alternation image sits inside the kernel",
        cw.g1_leakage, 1e-9);
  if (req.k_max >= 2)
    r.add("second_level_match", "two routes to the second level dimension agree",
          std::abs(cw.dim_ker_delta2 - table.dim(2)), 0.5);

  r.data["group"] = g.name();
  r.data["v_dim"] = g.v_dim();
  r.data["dim"] = g.dim();
  Json levels = Json::array();
  for (const auto& level : table.levels) {
    Json e;
    e["k"] = level.k;
    e["dim"] = level.dim();
    e["gap_ratio"] = std::isfinite(level.gap_ratio) ? Json(level.gap_ratio) : Json("infinite");
    levels.push_back(std::move(e));
  }
  r.data["levels"] = std::move(levels);
  r.data["type"] = to_string(table.type);
  Json torsion;
  torsion["image_dim"] = static_cast<int>(split.image.size());
  torsion["complement_dim"] = static_cast<int>(split.complement.size());
  torsion["invariance_leakage"] = split.invariance_leakage;
  r.data["torsion"] = std::move(torsion);
  Json curvature_dims;
  curvature_dims["two_forms"] = cw.dim_g_lambda2;
  curvature_dims["kernel"] = cw.dim_R;
  curvature_dims["kernel_complement"] = cw.dim_d1;
  curvature_dims["level_one_image"] = cw.dim_delta_g1;
  curvature_dims["reduced_kernel"] = cw.dim_d2;
  curvature_dims["second_level"] = cw.dim_ker_delta2;
  r.data["curvature_splitting"] = std::move(curvature_dims);
  return r;
}

Report run_gstructure(const std::string& subject, const Json* config, const SuiteOptions& opt) {
  Report r = make_report("gstructure", subject, opt);
  const LocalGStructure s = resolve_gstructure(subject, config);

  r.add("frame_regularity", "the frame field stays invertible over the base",
        std::max(0.0, 1e-8 - s.min_frame_singular(opt.samples, opt.seed)), 1e-9);

  const ProlongationTable table = prolong(s.group(), 2);
  r.data["group"] = s.group().name();
  r.data["v_dim"] = s.dim();
  r.data["flat_frame"] = s.is_flat();
  r.data["type"] = to_string(table.type);

  const FirstProlongation fp =
      first_prolongation_bundle(s, std::min(opt.samples, 12), opt.seed);
  r.add("theta1_equivariance", "the normalized horizontal family transforms equivariantly",
        fp.theta1_equivariance, 1e-6);

  double torsion_sup = 0.0;
  for (double t : fp.torsion_norm) torsion_sup = std::max(torsion_sup, t);
  r.data["residual_torsion_sup"] = torsion_sup;
  r.data["coset_dim"] = fp.coset_dim;

  if (table.type == ProlongationType::Type1) {
    const CartanConnection conn = type1_connection(s);
    r.add("connection_reproduction", "the canonical connection reproduces the structure group",
          conn.reproduction_residual(std::min(opt.samples, 16), opt.seed), 1e-7);
    if (conn.model().kind() == ModelKind::Principal)
      r.add("connection_equivariance", "the canonical connection is equivariant",
            conn.equivariance_residual(std::min(opt.samples, 12), opt.seed), 1e-6);
    if (s.is_flat()) {
      const auto pts = sample_box(conn.model().chart(), std::min(opt.samples, 16), opt.seed);
      r.add("connection_flatness", "a flat structure gets a flat canonical connection",
            sup_norm(curvature(conn), pts), 1e-6);
    }
  } else if (table.type == ProlongationType::Type2 && s.is_flat()) {
    const CartanConnection conn = type2_connection(s);
    r.add("connection_reproduction", "the order two connection reproduces the extended fiber",
          conn.reproduction_residual(std::min(opt.samples, 12), opt.seed), 1e-7);
    const auto pts = sample_box(conn.model().chart(), std::min(opt.samples, 8), opt.seed);
    r.add("connection_flatness", "the flat model carries a flat order two connection",
          sup_norm(curvature(conn), pts), 1e-6);
  } else {
    r.data["connection"] = "none at this order";
  }
  return r;
}

namespace {

Vec rk4_flow(const JetVectorField& x_field, Vec p, int steps) {
  const double h = 1.0 / steps;
  for (int s = 0; s < steps; ++s) {
    const Vec k1 = x_field.eval(p);
    const Vec k2 = x_field.eval(Vec(p + 0.5 * h * k1));
    const Vec k3 = x_field.eval(Vec(p + 0.5 * h * k2));
    const Vec k4 = x_field.eval(Vec(p + h * k3));
    p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return p;
}

JetVectorField random_vanishing_field(int nvars, int order, double scale, RandomStream& rng) {
  PolynomialMap map;
  map.comp.assign(static_cast<std::size_t>(nvars), Polynomial(nvars));
  std::vector<int> exponents(static_cast<std::size_t>(nvars), 0);
  const std::function<void(int, int)> fill = [&](int var, int budget) {
    if (var == nvars) {
      int total = 0;
      for (int e : exponents) total += e;
      if (total == 0) return;
      for (auto& comp : map.comp) comp.add_term(exponents, rng.uniform(-scale, scale));
      return;
    }
    for (int e = 0; e <= budget; ++e) {
      exponents[static_cast<std::size_t>(var)] = e;
      fill(var + 1, budget - e);
    }
    exponents[static_cast<std::size_t>(var)] = 0;
  };
  fill(0, order);
  return JetVectorField(std::move(map), order);
}

JetElement random_jet(int nvars, int order, RandomStream& rng) {
  JetVectorField field = random_vanishing_field(nvars, order, 0.3, rng);
  PolynomialMap map = field.components();
  for (int i = 0; i < nvars; ++i) {
    Polynomial::Exponents linear(static_cast<std::size_t>(nvars), 0);
    linear[static_cast<std::size_t>(i)] = 1;
    map.comp[static_cast<std::size_t>(i)].add_term(linear, 1.0);
  }
  return JetElement(std::move(map), order);
}

} // namespace

Report run_jets(const std::string& subject, const Json* config, const SuiteOptions& opt) {
  Report r = make_report("jets", subject, opt);
  LinearLieAlgebra g = config != nullptr ? parse_linear_group((*config)["group"])
                                         : parse_linear_group(Json(subject));
  int order = opt.order;
  if (config != nullptr && config->contains("order")) {
    const Json& o = (*config)["order"];
    if (!o.is_number_integer()) fail(Err::ConfigError, "\"order\" must be an integer");
    order = o.get<int>();
  }
  if (order < 1 || order > kMaxJetOrder)
    fail(Err::ConfigError, "order must lie between 1 and " + std::to_string(kMaxJetOrder));
  const int n = g.v_dim();

  const LieAlgebra symbol = g_infinity_truncated(g, order);
  r.add("symbol_closure", "the truncated symbol algebra satisfies Jacobi",
        symbol.antisymmetry_residual() + symbol.jacobi_residual(), 1e-10);

  RandomStream rng(opt.seed);
  double worst_group = 0.0;
  for (int run = 0; run < std::min(opt.samples, 8); ++run) {
    const JetElement a = random_jet(n, order, rng);
    const JetElement b = random_jet(n, order, rng);
    const JetElement c = random_jet(n, order, rng);
    worst_group = std::max(worst_group, jet_compose(jet_compose(a, b), c)
                                            .distance(jet_compose(a, jet_compose(b, c))));
    worst_group = std::max(worst_group, jet_compose(a, jet_invert(a))
                                            .distance(JetElement::identity(n, order)));
  }
  r.add("group_axioms", "jet composition is associative with two sided inverses",
        worst_group, 1e-11);

  // The flow jet is exact only through the truncation order, so the points
  // stay close enough to the origin for the remainder to sit below tolerance.
  double worst_flow = 0.0;
  for (int run = 0; run < std::min(opt.samples, 6); ++run) {
    const JetVectorField x = random_vanishing_field(n, order, 0.1, rng);
    const JetElement flow = jet_exp(x);
    const Vec p = rng.vector(n, 0.025);
    worst_flow = std::max(worst_flow, (flow.eval(p) - rk4_flow(x, p, 128)).norm());
  }
  r.add("flow_exponential", "the flow jet matches numerical integration near the origin",
        worst_flow, 1e-6);

  double worst_bracket = 0.0;
  const double h = 1e-5;
  for (int run = 0; run < std::min(opt.samples, 4); ++run) {
    const JetVectorField x = random_vanishing_field(n, order, 0.3, rng);
    const JetVectorField y = random_vanishing_field(n, order, 0.3, rng);
    const JetVectorField plus = jet_adjoint(jet_exp(x * h), y);
    const JetVectorField minus = jet_adjoint(jet_exp(x * (-h)), y);
    const JetVectorField stencil = (plus - minus) * (1.0 / (2.0 * h));
    worst_bracket = std::max(worst_bracket,
                             stencil.distance(jet_bracket(x, y) * (-1.0)));
  }
  r.add("bracket_flow_derivative", "the bracket is the derivative of the adjoint action",
        worst_bracket, 1e-6);

  const CartanConnection conn = flat_model_connection(g, order);
  r.add("model_reproduction", "the canonical model connection reproduces its fiber algebra",
        conn.reproduction_residual(std::min(opt.samples, 16), opt.seed), 1e-8);
  const auto pts = sample_box(conn.model().chart(), std::min(opt.samples, 12), opt.seed);
  r.add("model_flatness", "the canonical model connection is flat",
        sup_norm(curvature(conn), pts), 1e-6);

  r.data["group"] = g.name();
  r.data["order"] = order;
  r.data["symbol_dim"] = symbol.dim();
  r.data["symbol_name"] = symbol.name();
  return r;
}

} // namespace cartanlab::cli
