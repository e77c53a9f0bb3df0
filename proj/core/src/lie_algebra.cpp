#include "cartanlab/lie_algebra.hpp"

#include <cmath>

namespace cartanlab {

namespace {

constexpr double kStructureTol = 1e-12;
constexpr double kClosureTol = 1e-10;

double scale_of(const std::vector<Mat>& ad) {
  double s = 1.0;
  for (const Mat& a : ad) s = std::max(s, a.cwiseAbs().maxCoeff());
  return s;
}

} // namespace

LieAlgebra::LieAlgebra(std::string name, const std::vector<std::vector<Vec>>& table)
    : m_name(std::move(name)) {
  const int n = static_cast<int>(table.size());
  require(n > 0, Err::InvalidArgument, "empty bracket table");
  m_ad.assign(n, Mat::Zero(n, n));
  for (int i = 0; i < n; ++i) {
    require(static_cast<int>(table[i].size()) == n, Err::DimensionMismatch, "bracket table row");
    for (int j = 0; j < n; ++j) {
      require(table[i][j].size() == n, Err::DimensionMismatch, "bracket table entry");
      m_ad[i].col(j) = table[i][j];
    }
  }
  const double s = scale_of(m_ad);
  require(antisymmetry_residual() <= kStructureTol * s, Err::InvalidStructure,
          m_name + ": brackets are not antisymmetric");
  require(jacobi_residual() <= kStructureTol * s, Err::InvalidStructure,
          m_name + ": Jacobi identity fails");
}

Vec LieAlgebra::bracket(const Vec& x, const Vec& y) const {
  require(x.size() == dim() && y.size() == dim(), Err::DimensionMismatch, "bracket operands");
  Vec out = Vec::Zero(dim());
  for (int i = 0; i < dim(); ++i)
    if (x[i] != 0.0) out += x[i] * (m_ad[i] * y);
  return out;
}

Mat LieAlgebra::ad(const Vec& x) const {
  require(x.size() == dim(), Err::DimensionMismatch, "ad operand");
  Mat out = Mat::Zero(dim(), dim());
  for (int i = 0; i < dim(); ++i)
    if (x[i] != 0.0) out += x[i] * m_ad[i];
  return out;
}

Mat LieAlgebra::killing_matrix() const {
  Mat k(dim(), dim());
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j <= i; ++j) k(i, j) = k(j, i) = (m_ad[i] * m_ad[j]).trace();
  return k;
}

double LieAlgebra::antisymmetry_residual() const {
  double r = 0.0;
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < dim(); ++j)
      r = std::max(r, (m_ad[i].col(j) + m_ad[j].col(i)).cwiseAbs().maxCoeff());
  return r;
}

double LieAlgebra::jacobi_residual() const {
  double r = 0.0;
  for (int i = 0; i < dim(); ++i)
    for (int j = i + 1; j < dim(); ++j)
      for (int k = j + 1; k < dim(); ++k) {
        const Vec defect = bracket(Vec(m_ad[i].col(j)), Vec::Unit(dim(), k)) +
                           bracket(Vec(m_ad[j].col(k)), Vec::Unit(dim(), i)) +
                           bracket(Vec(m_ad[k].col(i)), Vec::Unit(dim(), j));
        r = std::max(r, defect.cwiseAbs().maxCoeff());
      }
  return r;
}

namespace {

Mat span_matrix(const std::vector<Mat>& basis) {
  const auto rows = basis.front().size();
  Mat span(rows, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    require(basis[i].size() == rows, Err::DimensionMismatch, "basis matrix shape");
    span.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const Vec>(basis[i].data(), rows);
  }
  return span;
}

Vec project_onto_span(const Mat& span, const Vec& target, double* residual) {
  Vec x = span.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(target);
  if (residual) *residual = (span * x - target).norm();
  return x;
}

} // namespace

LieAlgebra algebra_from_matrices(const std::string& name, const std::vector<Mat>& basis) {
  require(!basis.empty(), Err::InvalidArgument, "empty matrix basis");
  const int n = static_cast<int>(basis.size());
  const Mat span = span_matrix(basis);
  double scale = 1.0;
  for (const Mat& b : basis) scale = std::max(scale, b.norm());
  std::vector<std::vector<Vec>> table(n, std::vector<Vec>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Mat c = basis[i] * basis[j] - basis[j] * basis[i];
      double resid = 0.0;
      table[i][j] =
          project_onto_span(span, Eigen::Map<const Vec>(c.data(), c.size()), &resid);
      require(resid <= kClosureTol * scale * scale, Err::NotClosed,
              name + ": commutator leaves the span");
    }
  return LieAlgebra(name, table);
}

Vec SubalgebraEmbedding::restrict_to_g(const Vec& xh, double* residual) const {
  return project_onto_span(inclusion, xh, residual);
}

Mat SubalgebraEmbedding::projector() const {
  return inclusion * (inclusion.transpose() * inclusion).inverse() * inclusion.transpose();
}

SubalgebraEmbedding make_subalgebra(const LieAlgebra& h, const std::string& g_name,
                                    const std::vector<Vec>& basis_in_h) {
  require(!basis_in_h.empty(), Err::InvalidArgument, "empty subalgebra basis");
  const int k = static_cast<int>(basis_in_h.size());
  Mat incl(h.dim(), k);
  for (int i = 0; i < k; ++i) incl.col(i) = basis_in_h[i];
  require(incl.colPivHouseholderQr().rank() == k, Err::InvalidArgument,
          g_name + ": subalgebra basis is linearly dependent");
  double scale = std::max(1.0, incl.cwiseAbs().maxCoeff());
  std::vector<std::vector<Vec>> table(k, std::vector<Vec>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      double resid = 0.0;
      table[i][j] = project_onto_span(incl, h.bracket(basis_in_h[i], basis_in_h[j]), &resid);
      require(resid <= kClosureTol * scale * scale, Err::NotClosed,
              g_name + ": bracket leaves the subspace");
    }
  return SubalgebraEmbedding{h, LieAlgebra(g_name, table), incl};
}

MatrixRep::MatrixRep(LieAlgebra algebra, std::vector<Mat> generators)
    : m_algebra(std::move(algebra)), m_gen(std::move(generators)) {
  require(static_cast<int>(m_gen.size()) == m_algebra.dim(), Err::DimensionMismatch,
          "one generator per basis element required");
  const auto d = m_gen.front().rows();
  for (const Mat& g : m_gen)
    require(g.rows() == d && g.cols() == d, Err::DimensionMismatch, "square generators");
  m_span = span_matrix(m_gen);
  double scale = 1.0;
  for (const Mat& g : m_gen) scale = std::max(scale, g.norm());
  require(homomorphism_residual() <= 1e-10 * scale * scale, Err::NotHomomorphism,
          m_algebra.name() + ": generators do not represent the brackets");
}

Mat MatrixRep::map(const Vec& x) const {
  require(x.size() == m_algebra.dim(), Err::DimensionMismatch, "representation argument");
  Mat out = Mat::Zero(mat_dim(), mat_dim());
  for (int i = 0; i < m_algebra.dim(); ++i)
    if (x[i] != 0.0) out += x[i] * m_gen[i];
  return out;
}

Vec MatrixRep::project(const Mat& m, double* residual) const {
  require(m.rows() == mat_dim() && m.cols() == mat_dim(), Err::DimensionMismatch,
          "projection argument");
  return project_onto_span(m_span, Eigen::Map<const Vec>(m.data(), m.size()), residual);
}

double MatrixRep::homomorphism_residual() const {
  double r = 0.0;
  const int n = m_algebra.dim();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Mat lhs = map(Vec(m_algebra.ad_basis(i).col(j)));
      const Mat rhs = m_gen[i] * m_gen[j] - m_gen[j] * m_gen[i];
      r = std::max(r, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  return r;
}

MatrixRep restrict_rep(const MatrixRep& rep_h, const SubalgebraEmbedding& emb) {
  std::vector<Mat> gens;
  gens.reserve(static_cast<std::size_t>(emb.g.dim()));
  for (int i = 0; i < emb.g.dim(); ++i)
    gens.push_back(rep_h.map(emb.include(Vec::Unit(emb.g.dim(), i))));
  return MatrixRep(emb.g, std::move(gens));
}

MatrixRep adjoint_rep(const LieAlgebra& L) {
  std::vector<Mat> gens;
  gens.reserve(static_cast<std::size_t>(L.dim()));
  for (int i = 0; i < L.dim(); ++i) gens.push_back(L.ad_basis(i));
  return MatrixRep(L, std::move(gens));
}

LieAlgebra semidirect(const MatrixRep& rho, const std::string& name) {
  const int r = rho.mat_dim();
  const int m = rho.algebra().dim();
  const int n = r + m;
  std::vector<std::vector<Vec>> table(n, std::vector<Vec>(n, Vec::Zero(n)));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j)
      table[r + i][r + j].tail(m) = rho.algebra().ad_basis(i).col(j);
    for (int a = 0; a < r; ++a) {
      table[r + i][a].head(r) = rho.generator(i).col(a);
      table[a][r + i].head(r) = -rho.generator(i).col(a);
    }
  }
  return LieAlgebra(name, table);
}

} // namespace cartanlab
