#include "cartanlab/jets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include <unsupported/Eigen/MatrixFunctions>

#include "cartanlab/cartan.hpp"
#include "cartanlab/error.hpp"
#include "cartanlab/local_model.hpp"

namespace cartanlab {

namespace {

int tuple_degree(const std::vector<int>& e) { return std::accumulate(e.begin(), e.end(), 0); }

/// Exponent tuples with total degree in [lo, hi], odometer order.
std::vector<std::vector<int>> exponent_range(int n, int lo, int hi) {
  std::vector<std::vector<int>> out;
  std::vector<int> e(static_cast<std::size_t>(n), 0);
  while (true) {
    const int d = tuple_degree(e);
    if (d >= lo && d <= hi) out.push_back(e);
    int s = n - 1;
    while (s >= 0 && e[static_cast<std::size_t>(s)] == hi) e[static_cast<std::size_t>(s--)] = 0;
    if (s < 0) break;
    ++e[static_cast<std::size_t>(s)];
  }
  return out;
}

Polynomial degree_part(const Polynomial& p, int d) {
  Polynomial out(p.nvars());
  for (const auto& [e, c] : p.terms())
    if (tuple_degree(e) == d) out.add_term(e, c);
  return out;
}

double factorial(int m) {
  double f = 1.0;
  for (int i = 2; i <= m; ++i) f *= i;
  return f;
}

using PolyMat = std::vector<std::vector<Polynomial>>;

PolyMat poly_identity(int n) {
  PolyMat out(static_cast<std::size_t>(n),
              std::vector<Polynomial>(static_cast<std::size_t>(n), Polynomial(n)));
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = Polynomial::constant(n, 1.0);
  return out;
}

PolyMat poly_mat_mul(const PolyMat& a, const PolyMat& b, int max_degree) {
  const std::size_t n = a.size();
  PolyMat out(n, std::vector<Polynomial>(n, Polynomial(static_cast<int>(n))));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < n; ++l)
        out[i][j] += mul_truncated(a[i][l], b[l][j], max_degree);
  return out;
}

void check_jet_shape(int nvars, int order) {
  require(order >= 1 && order <= kMaxJetOrder, Err::DimensionOverflow,
          "jet order must be 1.." + std::to_string(kMaxJetOrder));
  require(nvars >= 1 && nvars <= kMaxJetVars, Err::DimensionOverflow,
          "chart dimension must be 1.." + std::to_string(kMaxJetVars));
}

} // namespace

JetElement::JetElement(PolynomialMap map, int order) : m_map(std::move(map)), m_order(order) {
  check_jet_shape(m_map.size(), order);
  const int n = m_map.size();
  const std::vector<int> origin(static_cast<std::size_t>(n), 0);
  for (Polynomial& p : m_map.comp) {
    require(p.nvars() == n, Err::DimensionMismatch, "component variable count");
    p = p.truncated(order);
    require(p.coefficient(origin) == 0.0, Err::InvalidArgument, "jets must fix the origin");
  }
}

JetElement JetElement::identity(int nvars, int order) {
  return linear(Mat::Identity(nvars, nvars), order);
}

JetElement JetElement::linear(const Mat& a, int order) {
  require(a.rows() == a.cols(), Err::DimensionMismatch, "square linear part expected");
  const int n = static_cast<int>(a.rows());
  PolynomialMap map;
  map.comp.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Polynomial p(n);
    for (int j = 0; j < n; ++j)
      if (a(i, j) != 0.0) p += Polynomial::variable(n, j) * a(i, j);
    map.comp.push_back(std::move(p));
  }
  return JetElement(std::move(map), order);
}

Mat JetElement::linear_block() const { return m_map.jacobian(Vec::Zero(nvars())); }

double JetElement::distance(const JetElement& o) const {
  require(nvars() == o.nvars() && m_order == o.m_order, Err::DimensionMismatch,
          "jet shapes differ");
  double d = 0.0;
  for (int i = 0; i < nvars(); ++i)
    d = std::max(d, Polynomial(component(i) - o.component(i)).max_abs_coefficient());
  return d;
}

JetVectorField::JetVectorField(PolynomialMap comp, int order)
    : m_comp(std::move(comp)), m_order(order) {
  check_jet_shape(m_comp.size(), order);
  const int n = m_comp.size();
  for (Polynomial& p : m_comp.comp) {
    require(p.nvars() == n, Err::DimensionMismatch, "component variable count");
    p = p.truncated(order);
  }
}

JetVectorField JetVectorField::zero(int nvars, int order) {
  PolynomialMap comp;
  comp.comp.assign(static_cast<std::size_t>(nvars), Polynomial(nvars));
  return JetVectorField(std::move(comp), order);
}

JetVectorField JetVectorField::constant(const Vec& v, int order) {
  const int n = static_cast<int>(v.size());
  PolynomialMap comp;
  for (int i = 0; i < n; ++i) comp.comp.push_back(Polynomial::constant(n, v[i]));
  return JetVectorField(std::move(comp), order);
}

JetVectorField JetVectorField::linear(const Mat& a, int order) {
  require(a.rows() == a.cols(), Err::DimensionMismatch, "square linear part expected");
  const int n = static_cast<int>(a.rows());
  PolynomialMap comp;
  for (int i = 0; i < n; ++i) {
    Polynomial p(n);
    for (int j = 0; j < n; ++j)
      if (a(i, j) != 0.0) p += Polynomial::variable(n, j) * a(i, j);
    comp.comp.push_back(std::move(p));
  }
  return JetVectorField(std::move(comp), order);
}

bool JetVectorField::vanishes_at_origin() const {
  const std::vector<int> origin(static_cast<std::size_t>(nvars()), 0);
  for (const Polynomial& p : m_comp.comp)
    if (p.coefficient(origin) != 0.0) return false;
  return true;
}

Vec JetVectorField::constant_term() const {
  const std::vector<int> origin(static_cast<std::size_t>(nvars()), 0);
  Vec v(nvars());
  for (int i = 0; i < nvars(); ++i) v[i] = component(i).coefficient(origin);
  return v;
}

Mat JetVectorField::linear_block() const { return m_comp.jacobian(Vec::Zero(nvars())); }

double JetVectorField::distance(const JetVectorField& o) const {
  require(nvars() == o.nvars() && m_order == o.m_order, Err::DimensionMismatch,
          "jet shapes differ");
  double d = 0.0;
  for (int i = 0; i < nvars(); ++i)
    d = std::max(d, Polynomial(component(i) - o.component(i)).max_abs_coefficient());
  return d;
}

JetVectorField& JetVectorField::operator+=(const JetVectorField& o) {
  require(nvars() == o.nvars() && m_order == o.m_order, Err::DimensionMismatch,
          "jet shapes differ");
  for (int i = 0; i < nvars(); ++i) m_comp.comp[static_cast<std::size_t>(i)] += o.component(i);
  return *this;
}

JetVectorField& JetVectorField::operator-=(const JetVectorField& o) {
  require(nvars() == o.nvars() && m_order == o.m_order, Err::DimensionMismatch,
          "jet shapes differ");
  for (int i = 0; i < nvars(); ++i) m_comp.comp[static_cast<std::size_t>(i)] -= o.component(i);
  return *this;
}

JetVectorField& JetVectorField::operator*=(double s) {
  for (Polynomial& p : m_comp.comp) p *= s;
  return *this;
}

JetElement jet_compose(const JetElement& a, const JetElement& b) {
  require(a.nvars() == b.nvars() && a.order() == b.order(), Err::DimensionMismatch,
          "jet shapes differ");
  PolynomialMap out;
  out.comp.reserve(static_cast<std::size_t>(a.nvars()));
  for (int i = 0; i < a.nvars(); ++i)
    out.comp.push_back(a.component(i).compose(b.map().comp, a.order()));
  return JetElement(std::move(out), a.order());
}

JetElement jet_invert(const JetElement& a) {
  const int n = a.nvars();
  const int k = a.order();
  Eigen::FullPivLU<Mat> lu(a.linear_block());
  require(lu.isInvertible(), Err::SingularLinearPart, "inverse jet needs an invertible linear part");
  const Mat ai = lu.inverse();
  PolynomialMap bmap = JetElement::linear(ai, k).map();
  for (int d = 2; d <= k; ++d) {
    const JetElement c = jet_compose(a, JetElement(bmap, k));
    std::vector<Polynomial> defect;
    defect.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) defect.push_back(degree_part(c.component(i), d));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (ai(i, j) != 0.0)
          bmap.comp[static_cast<std::size_t>(i)] -= defect[static_cast<std::size_t>(j)] * ai(i, j);
  }
  return JetElement(std::move(bmap), k);
}

JetVectorField jet_bracket(const JetVectorField& X, const JetVectorField& Y) {
  require(X.nvars() == Y.nvars() && X.order() == Y.order(), Err::DimensionMismatch,
          "jet shapes differ");
  const int n = X.nvars();
  const int k = X.order();
  PolynomialMap out;
  for (int i = 0; i < n; ++i) {
    Polynomial acc(n);
    for (int j = 0; j < n; ++j) {
      acc += mul_truncated(X.component(i).derivative(j), Y.component(j), k);
      acc -= mul_truncated(Y.component(i).derivative(j), X.component(j), k);
    }
    out.comp.push_back(std::move(acc));
  }
  return JetVectorField(std::move(out), k);
}

JetElement jet_exp(const JetVectorField& X) {
  require(X.vanishes_at_origin(), Err::InvalidArgument,
          "flow jets need a field vanishing at the origin");
  const int n = X.nvars();
  const int k = X.order();
  const auto monos = exponent_range(n, 1, k);
  std::map<std::vector<int>, int> index;
  for (std::size_t a = 0; a < monos.size(); ++a) index[monos[a]] = static_cast<int>(a);
  const auto m = static_cast<Eigen::Index>(monos.size());

  Mat L = Mat::Zero(m, m);
  for (Eigen::Index b = 0; b < m; ++b) {
    Polynomial mono(n);
    mono.add_term(monos[static_cast<std::size_t>(b)], 1.0);
    Polynomial lm(n);
    for (int j = 0; j < n; ++j) lm += mul_truncated(X.component(j), mono.derivative(j), k);
    for (const auto& [e, c] : lm.terms()) L(index.at(e), b) += c;
  }
  const Mat F = L.exp();

  PolynomialMap phi;
  phi.comp.assign(static_cast<std::size_t>(n), Polynomial(n));
  for (int i = 0; i < n; ++i) {
    std::vector<int> unit(static_cast<std::size_t>(n), 0);
    unit[static_cast<std::size_t>(i)] = 1;
    const int col = index.at(unit);
    for (Eigen::Index a = 0; a < m; ++a)
      if (F(a, col) != 0.0)
        phi.comp[static_cast<std::size_t>(i)].add_term(monos[static_cast<std::size_t>(a)],
                                                       F(a, col));
  }
  return JetElement(std::move(phi), k);
}

JetVectorField jet_adjoint(const JetElement& a, const JetVectorField& X) {
  require(a.nvars() == X.nvars() && a.order() == X.order(), Err::DimensionMismatch,
          "jet shapes differ");
  const int n = a.nvars();
  const int k = a.order();
  Eigen::FullPivLU<Mat> lu(a.linear_block());
  require(lu.isInvertible(), Err::SingularLinearPart, "pullback needs an invertible linear part");
  const Mat ai = lu.inverse();

  std::vector<Polynomial> xa;
  xa.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xa.push_back(X.component(i).compose(a.map().comp, k));

  PolyMat M(static_cast<std::size_t>(n),
            std::vector<Polynomial>(static_cast<std::size_t>(n), Polynomial(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Polynomial s(n);
      for (int l = 0; l < n; ++l)
        if (ai(i, l) != 0.0) s += a.component(l).derivative(j) * ai(i, l);
      if (i == j) s -= Polynomial::constant(n, 1.0);
      M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = std::move(s);
    }

  PolyMat series = poly_identity(n);
  PolyMat power = poly_identity(n);
  for (int p = 1; p <= k; ++p) {
    power = poly_mat_mul(power, M, k);
    const double sign = p % 2 == 0 ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        series[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
            power[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * sign;
  }

  std::vector<Polynomial> rotated;
  rotated.reserve(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) {
    Polynomial s(n);
    for (int j = 0; j < n; ++j)
      if (ai(l, j) != 0.0) s += xa[static_cast<std::size_t>(j)] * ai(l, j);
    rotated.push_back(std::move(s));
  }
  PolynomialMap out;
  for (int i = 0; i < n; ++i) {
    Polynomial s(n);
    for (int l = 0; l < n; ++l)
      s += mul_truncated(series[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)],
                         rotated[static_cast<std::size_t>(l)], k);
    out.comp.push_back(std::move(s));
  }
  return JetVectorField(std::move(out), k);
}

LieAlgebra g_infinity_truncated(const LinearLieAlgebra& g, int order) {
  check_jet_shape(g.v_dim(), order);
  const int n = g.v_dim();
  const ProlongationTable table = prolong(g, order);
  require(table.dim(order) == 0, Err::TruncationNotClosed,
          g.name() + ": prolongation does not vanish at order " + std::to_string(order));

  std::vector<JetVectorField> fields;
  for (int i = 0; i < n; ++i) fields.push_back(JetVectorField::constant(Vec::Unit(n, i), order));
  for (int mu = 0; mu < g.dim(); ++mu)
    fields.push_back(JetVectorField::linear(g.basis(mu), order));
  for (int level = 1; level < order; ++level) {
    const auto tuples = multiset_tuples(n, level + 1);
    for (const Vec& T : table.levels[static_cast<std::size_t>(level - 1)].basis) {
      PolynomialMap comp;
      comp.comp.assign(static_cast<std::size_t>(n), Polynomial(n));
      for (std::size_t t = 0; t < tuples.size(); ++t) {
        std::vector<int> expo(static_cast<std::size_t>(n), 0);
        for (int v : tuples[t]) ++expo[static_cast<std::size_t>(v)];
        double count = factorial(level + 1);
        for (int v = 0; v < n; ++v) count /= factorial(expo[static_cast<std::size_t>(v)]);
        for (int i = 0; i < n; ++i) {
          const double c = count * T[static_cast<Eigen::Index>(t) * n + i];
          if (c != 0.0) comp.comp[static_cast<std::size_t>(i)].add_term(expo, c);
        }
      }
      fields.push_back(JetVectorField(std::move(comp), order));
    }
  }

  const int dim = static_cast<int>(fields.size());
  const auto monos = exponent_range(n, 0, order);
  std::map<std::vector<int>, int> row;
  for (std::size_t a = 0; a < monos.size(); ++a) row[monos[a]] = static_cast<int>(a);
  auto flatten = [&](const JetVectorField& f) {
    Vec out = Vec::Zero(static_cast<Eigen::Index>(monos.size()) * n);
    for (int i = 0; i < n; ++i)
      for (const auto& [e, c] : f.component(i).terms())
        out[static_cast<Eigen::Index>(row.at(e)) * n + i] = c;
    return out;
  };
  Mat span(static_cast<Eigen::Index>(monos.size()) * n, dim);
  for (int i = 0; i < dim; ++i) span.col(i) = flatten(fields[static_cast<std::size_t>(i)]);
  Eigen::BDCSVD<Mat> svd(span, Eigen::ComputeThinU | Eigen::ComputeThinV);

  std::vector<std::vector<Vec>> bracket(
      static_cast<std::size_t>(dim),
      std::vector<Vec>(static_cast<std::size_t>(dim), Vec::Zero(dim)));
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      const Vec flat = flatten(
          jet_bracket(fields[static_cast<std::size_t>(i)], fields[static_cast<std::size_t>(j)]));
      const Vec coords = svd.solve(flat);
      require((span * coords - flat).norm() <= 1e-10 * (1.0 + flat.norm()),
              Err::TruncationNotClosed, g.name() + ": bracket leaves the truncated span");
      bracket[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = coords;
      bracket[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = -coords;
    }
  const std::string base = g.name().empty() ? "g" : g.name();
  return LieAlgebra("a" + std::to_string(order) + "_" + base, bracket);
}

CartanConnection flat_model_connection(const LinearLieAlgebra& g, int order, double base_radius,
                                       double fiber_radius) {
  check_jet_shape(g.v_dim(), order);
  const int n = g.v_dim();
  if (g.dim() == 0) return type1_connection(LocalGStructure::flat(g, base_radius));

  const LieAlgebra ak = g_infinity_truncated(g, order);
  const int fiber_dim = ak.dim() - n;
  Mat adspan(ak.dim() * ak.dim(), ak.dim());
  for (int i = 0; i < ak.dim(); ++i) {
    const Mat ad = ak.ad_basis(i);
    adspan.col(i) = Eigen::Map<const Vec>(ad.data(), ad.size());
  }
  Eigen::JacobiSVD<Mat> svd(adspan);
  require(svd.singularValues().minCoeff() > 1e-9 * svd.singularValues().maxCoeff(),
          Err::InvalidStructure, ak.name() + ": symbol algebra has a center, no adjoint chart");

  std::vector<Vec> sub;
  for (int i = 0; i < fiber_dim; ++i) sub.push_back(Vec::Unit(ak.dim(), n + i));
  const std::string base = g.name().empty() ? "g" : g.name();
  const LocalModel model =
      LocalModel::principal(make_subalgebra(ak, "vert_" + base, sub), adjoint_rep(ak),
                            Box::cube(n, base_radius), Box::cube(fiber_dim, fiber_radius));
  Mat A = Mat::Zero(ak.dim(), n);
  A.topRows(n) = Mat::Identity(n, n);
  return CartanConnection(model,
                          make_principal_cartan(model, [A](const Vec&) { return A; }).kappa());
}

} // namespace cartanlab
