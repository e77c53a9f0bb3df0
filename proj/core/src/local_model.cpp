#include "cartanlab/local_model.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include "cartanlab/error.hpp"
#include "cartanlab/form_field.hpp"
#include "cartanlab/matrix_group.hpp"
#include "cartanlab/presets.hpp"

namespace cartanlab {

LocalModel LocalModel::bare(SubalgebraEmbedding pair, Box chart) {
  require(chart.dim() == pair.h.dim(), Err::DimensionMismatch,
          "a bare model chart must have the dimension of h");
  LocalModel m(std::move(pair));
  m.m_kind = ModelKind::BareManifold;
  m.m_chart = std::move(chart);
  return m;
}

LocalModel LocalModel::principal(SubalgebraEmbedding pair, MatrixRep rep_h, Box base, Box fiber) {
  require(fiber.dim() == pair.g.dim(), Err::DimensionMismatch,
          "fiber chart must have the dimension of g");
  require(rep_h.algebra().dim() == pair.h.dim(), Err::DimensionMismatch,
          "ambient representation must belong to h");
  MatrixRep rep_g = restrict_rep(rep_h, pair);
  LocalModel m(std::move(pair));
  m.m_kind = ModelKind::Principal;
  m.m_rep_g = std::move(rep_g);
  m.m_rep_h = std::move(rep_h);
  m.m_base = std::move(base);
  m.m_fiber = std::move(fiber);
  m.m_chart = Box::product(m.m_base, m.m_fiber);
  return m;
}

int LocalModel::base_dim() const {
  return m_kind == ModelKind::Principal ? m_base.dim() : m_chart.dim();
}

int LocalModel::fiber_dim() const { return m_kind == ModelKind::Principal ? m_fiber.dim() : 0; }

const Box& LocalModel::base() const {
  return m_kind == ModelKind::Principal ? m_base : m_chart;
}

const Box& LocalModel::fiber() const {
  require(m_kind == ModelKind::Principal, Err::ModelMismatch, "bare models have no fiber chart");
  return m_fiber;
}

const MatrixRep& LocalModel::group_rep() const {
  require(m_rep_g.has_value(), Err::ModelMismatch, "model carries no group representation");
  return *m_rep_g;
}

const MatrixRep& LocalModel::ambient_rep() const {
  require(m_rep_h.has_value(), Err::ModelMismatch, "model carries no ambient representation");
  return *m_rep_h;
}

Mat LocalModel::group_at(const Vec& u) const {
  return group_exp(group_rep(), fiber_part(u));
}

Vec LocalModel::fundamental_field(const Vec& u, const Vec& X) const {
  require(m_kind == ModelKind::Principal, Err::ModelMismatch,
          "fundamental fields need a principal model");
  require(X.size() == g().dim(), Err::DimensionMismatch, "generator must lie in g");
  Vec out = Vec::Zero(chart_dim());
  const Mat ad_t = g().ad(fiber_part(u));
  out.tail(fiber_dim()) = phi1(ad_t).fullPivLu().solve(X);
  return out;
}

Vec LocalModel::right_translate(const Vec& u, const Vec& s) const {
  require(m_kind == ModelKind::Principal, Err::ModelMismatch,
          "right translation needs a principal model");
  const MatrixRep& rep = group_rep();
  Vec out = u;
  out.tail(fiber_dim()) =
      group_log(rep, Mat(group_exp(rep, fiber_part(u)) * group_exp(rep, s)));
  return out;
}

Mat LocalModel::right_translate_differential(const Vec& u, const Vec& s) const {
  const int n = chart_dim();
  const int m = base_dim();
  Mat J = Mat::Zero(n, n);
  J.topLeftCorner(m, m).setIdentity();
  auto fiber_map = [this, &s, m](const Vec& t) {
    Vec point(m + t.size());
    point.head(m).setZero();
    point.tail(t.size()) = t;
    return Vec(right_translate(point, s).tail(t.size()));
  };
  const Vec t0 = fiber_part(u);
  for (int j = 0; j < fiber_dim(); ++j)
    J.col(m + j).tail(fiber_dim()) =
        directional_derivative(fiber_map, t0, Vec::Unit(fiber_dim(), j), 0);
  return J;
}

Mat LocalModel::ad_inverse_on_h(const Vec& s) const {
  require(s.size() == g().dim(), Err::DimensionMismatch, "group chart vector expected");
  return Mat(-h().ad(m_pair.include(s))).exp();
}

LocalModel bare_model(const std::string& pair_name, double radius) {
  SubalgebraEmbedding pair = pair_preset(pair_name);
  const int n = pair.h.dim();
  return LocalModel::bare(std::move(pair), Box::cube(n, radius));
}

LocalModel principal_model(const std::string& pair_name, double base_radius,
                           double fiber_radius) {
  SubalgebraEmbedding pair = pair_preset(pair_name);
  const std::string h_name = pair_name.substr(0, pair_name.find('/'));
  MatrixRep rep_h = rep_preset(h_name);
  const int m = pair.h.dim() - pair.g.dim();
  Box base = Box::cube(m, base_radius);
  Box fiber = Box::cube(pair.g.dim(), fiber_radius);
  return LocalModel::principal(std::move(pair), std::move(rep_h), std::move(base),
                               std::move(fiber));
}

MatrixRep adjoint_rep_on_h(const SubalgebraEmbedding& pair) {
  std::vector<Mat> gens;
  for (int i = 0; i < pair.g.dim(); ++i) gens.push_back(pair.h.ad(pair.include(Vec::Unit(pair.g.dim(), i))));
  return MatrixRep(pair.g, gens);
}

} // namespace cartanlab
