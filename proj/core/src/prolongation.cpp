#include "cartanlab/prolongation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <unsupported/Eigen/MatrixFunctions>

#include "cartanlab/error.hpp"
#include "cartanlab/form_field.hpp"
#include "cartanlab/jets.hpp"
#include "cartanlab/local_model.hpp"
#include "cartanlab/matrix_group.hpp"

namespace cartanlab {

namespace {

constexpr double kRankTol = 1e-9;

// Constraint matrices in this file are built from projectors and 0/1
// incidence patterns, so a genuine entry is at least 1/dim while residue
// of a cancelled projector sits at machine scale.
constexpr double kGhostTol = 1e-12;
constexpr double kClosureTol = 1e-10;
const double kInf = std::numeric_limits<double>::infinity();

std::vector<std::pair<int, int>> index_pairs(int n) {
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) out.emplace_back(a, b);
  return out;
}

int matrix_rank(const Mat& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(m);
  const double smax = svd.singularValues()(0);
  if (smax <= kGhostTol) return 0;
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > kRankTol * smax) ++r;
  return r;
}

/// Orthonormal kernel basis of C acting on R^cols; empty or zero C means
/// every vector is in the kernel.
std::vector<Vec> kernel_basis(const Mat& C, int cols, double* gap_ratio) {
  if (gap_ratio) *gap_ratio = kInf;
  std::vector<Vec> out;
  if (C.rows() == 0 || C.cwiseAbs().maxCoeff() <= kGhostTol) {
    for (int i = 0; i < cols; ++i) out.push_back(Vec::Unit(cols, i));
    return out;
  }
  Eigen::JacobiSVD<Mat> svd(C, Eigen::ComputeFullV);
  const Vec sigma = svd.singularValues();
  const double smax = sigma(0);
  int r = 0;
  while (r < sigma.size() && sigma(r) > kRankTol * smax) ++r;
  if (gap_ratio) {
    const double cut = r < sigma.size() ? sigma(r) : 0.0;
    *gap_ratio = (r == 0 || cut == 0.0) ? kInf : sigma(r - 1) / cut;
  }
  for (int i = r; i < cols; ++i) out.push_back(Vec(svd.matrixV().col(i)));
  return out;
}

/// Matrix of the alternation g (x) V* -> V (x) Lambda^2 V*, input columns
/// mu * n + j, output rows in two_form_flat coordinates.
Mat alternation_on_gv(const LinearLieAlgebra& g) {
  const int n = g.v_dim();
  const auto pairs = index_pairs(n);
  Mat D = Mat::Zero(static_cast<Eigen::Index>(pairs.size()) * n, g.dim() * n);
  for (int mu = 0; mu < g.dim(); ++mu)
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const auto [a, b] = pairs[p];
      D.block(static_cast<Eigen::Index>(p) * n, mu * n + b, n, 1) += g.basis(mu).col(a);
      D.block(static_cast<Eigen::Index>(p) * n, mu * n + a, n, 1) -= g.basis(mu).col(b);
    }
  return D;
}

VectorTensor conjugate_two_form(const Mat& a, const VectorTensor& T) {
  const int n = T.v_dim();
  const Mat ai = a.inverse();
  VectorTensor out(n, 2);
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      out.set_value({u, v}, Vec(a * T.eval({Vec(ai.col(u)), Vec(ai.col(v))})));
  return out;
}

struct AlternationSplit {
  Mat D;
  Mat image;      // orthonormal columns spanning the image
  Mat complement; // orthonormal columns spanning the orthogonal complement
  Mat pinv;
  std::vector<Vec> kernel;
};

AlternationSplit split_alternation(const LinearLieAlgebra& g) {
  AlternationSplit s;
  s.D = alternation_on_gv(g);
  const int rows = static_cast<int>(s.D.rows());
  if (s.D.cols() == 0 || rows == 0 || s.D.cwiseAbs().maxCoeff() == 0.0) {
    s.image = Mat::Zero(rows, 0);
    s.complement = Mat::Identity(rows, rows);
    s.pinv = Mat::Zero(s.D.cols(), rows);
    for (int i = 0; i < s.D.cols(); ++i) s.kernel.push_back(Vec::Unit(s.D.cols(), i));
    return s;
  }
  Eigen::JacobiSVD<Mat> svd(s.D, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec sigma = svd.singularValues();
  const double smax = sigma(0);
  int r = 0;
  while (r < sigma.size() && sigma(r) > kRankTol * smax) ++r;
  s.image = svd.matrixU().leftCols(r);
  s.complement = svd.matrixU().rightCols(rows - r);
  s.pinv = svd.matrixV().leftCols(r) *
           sigma.head(r).cwiseInverse().asDiagonal() * svd.matrixU().leftCols(r).transpose();
  for (int i = r; i < svd.matrixV().cols(); ++i) s.kernel.push_back(Vec(svd.matrixV().col(i)));
  return s;
}

Mat reshape_horizontal(const Vec& flat, int dim_g, int n) {
  Mat H(dim_g, n);
  for (int mu = 0; mu < dim_g; ++mu)
    for (int j = 0; j < n; ++j) H(mu, j) = flat[mu * n + j];
  return H;
}

LieAlgebra abelian_translations(int n) {
  std::vector<std::vector<Vec>> table(static_cast<std::size_t>(n),
                                      std::vector<Vec>(static_cast<std::size_t>(n), Vec::Zero(n)));
  return LieAlgebra("translations", table);
}

/// Parallelism given by the inverse frame on a bare chart with the abelian
/// pair; the degenerate-structure-group end of both connection builders.
CartanConnection coframe_parallelism(const LocalGStructure& s) {
  const int n = s.dim();
  const LieAlgebra trans = abelian_translations(n);
  std::vector<Vec> full;
  for (int i = 0; i < n; ++i) full.push_back(Vec::Unit(n, i));
  const LocalModel model = LocalModel::bare(make_subalgebra(trans, trans.name(), full), s.base());
  if (s.is_flat()) {
    FormField::Coefficients coef;
    for (int j = 0; j < n; ++j) {
      std::vector<Polynomial> comp(static_cast<std::size_t>(n), Polynomial(n));
      comp[static_cast<std::size_t>(j)] = Polynomial::constant(n, 1.0);
      coef[{j}] = comp;
    }
    return CartanConnection(model, FormField::poly(s.base(), 1, n, coef));
  }
  const FormField kappa = FormField::sampled(
      s.base(), 1, n, [s](const Vec& x, const std::vector<Vec>& args) {
        return Vec(s.frame_at(x).fullPivLu().solve(args[0]));
      });
  return CartanConnection(model, kappa);
}

} // namespace

LinearLieAlgebra::LinearLieAlgebra(int v_dim, std::vector<Mat> basis, std::string name)
    : m_v_dim(v_dim), m_basis(std::move(basis)), m_name(std::move(name)) {
  require(m_v_dim >= 1, Err::InvalidArgument, "positive V dimension required");
  for (const Mat& b : m_basis)
    require(b.rows() == m_v_dim && b.cols() == m_v_dim, Err::DimensionMismatch,
            m_name + ": basis matrices must act on V");
  m_span = Mat(m_v_dim * m_v_dim, dim());
  for (int i = 0; i < dim(); ++i)
    m_span.col(i) = Eigen::Map<const Vec>(m_basis[i].data(), m_span.rows());
  if (dim() == 0) return;
  require(matrix_rank(m_span) == dim(), Err::InvalidArgument,
          m_name + ": basis matrices are linearly dependent");
  double scale = 1.0;
  for (const Mat& b : m_basis) scale = std::max(scale, b.norm());
  for (int i = 0; i < dim(); ++i)
    for (int j = i + 1; j < dim(); ++j) {
      double resid = 0.0;
      coordinates(Mat(m_basis[i] * m_basis[j] - m_basis[j] * m_basis[i]), &resid);
      m_closure = std::max(m_closure, resid);
    }
  require(m_closure <= kClosureTol * scale * scale, Err::NotClosed,
          m_name + ": commutator leaves the span");
}

LinearLieAlgebra LinearLieAlgebra::from_rep(const MatrixRep& rep) {
  std::vector<Mat> basis;
  for (int i = 0; i < rep.algebra().dim(); ++i) basis.push_back(rep.generator(i));
  return LinearLieAlgebra(rep.mat_dim(), std::move(basis), rep.algebra().name());
}

Mat LinearLieAlgebra::element(const Vec& coords) const {
  require(coords.size() == dim(), Err::DimensionMismatch, "algebra coordinates expected");
  Mat out = Mat::Zero(m_v_dim, m_v_dim);
  for (int i = 0; i < dim(); ++i)
    if (coords[i] != 0.0) out += coords[i] * m_basis[i];
  return out;
}

Vec LinearLieAlgebra::coordinates(const Mat& m, double* residual) const {
  require(m.rows() == m_v_dim && m.cols() == m_v_dim, Err::DimensionMismatch,
          "projection argument");
  if (dim() == 0) {
    if (residual) *residual = m.norm();
    return Vec(0);
  }
  const Vec target = Eigen::Map<const Vec>(m.data(), m.size());
  Vec x = m_span.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(target);
  if (residual) *residual = (m_span * x - target).norm();
  return x;
}

MatrixRep LinearLieAlgebra::to_rep() const {
  require(dim() >= 1, Err::InvalidArgument,
          "the zero algebra has no generator representation");
  const std::string name = m_name.empty() ? "g" : m_name;
  return MatrixRep(algebra_from_matrices(name, m_basis), m_basis);
}

VectorTensor::VectorTensor(int v_dim, int slots) : m_v_dim(v_dim), m_slots(slots) {
  require(v_dim >= 1 && slots >= 1, Err::InvalidArgument, "tensor shape");
  std::size_t count = 1;
  for (int s = 0; s < slots; ++s) count *= static_cast<std::size_t>(v_dim);
  m_values.assign(count, Vec::Zero(v_dim));
}

int VectorTensor::flat_index(const std::vector<int>& idx) const {
  require(static_cast<int>(idx.size()) == m_slots, Err::DimensionMismatch, "tensor index arity");
  int flat = 0;
  for (int v : idx) {
    require(v >= 0 && v < m_v_dim, Err::InvalidArgument, "tensor index out of range");
    flat = flat * m_v_dim + v;
  }
  return flat;
}

const Vec& VectorTensor::value(const std::vector<int>& idx) const {
  return m_values[static_cast<std::size_t>(flat_index(idx))];
}

void VectorTensor::set_value(const std::vector<int>& idx, const Vec& v) {
  require(v.size() == m_v_dim, Err::DimensionMismatch, "tensor value dimension");
  m_values[static_cast<std::size_t>(flat_index(idx))] = v;
}

Vec VectorTensor::eval(const std::vector<Vec>& args) const {
  require(static_cast<int>(args.size()) == m_slots, Err::DimensionMismatch, "tensor arity");
  for (const Vec& a : args)
    require(a.size() == m_v_dim, Err::DimensionMismatch, "tensor argument dimension");
  Vec out = Vec::Zero(m_v_dim);
  std::vector<int> idx(static_cast<std::size_t>(m_slots), 0);
  while (true) {
    double w = 1.0;
    for (int s = 0; s < m_slots; ++s) w *= args[static_cast<std::size_t>(s)][idx[s]];
    if (w != 0.0) out += w * value(idx);
    int s = m_slots - 1;
    while (s >= 0 && ++idx[s] == m_v_dim) idx[s--] = 0;
    if (s < 0) break;
  }
  return out;
}

double VectorTensor::norm() const {
  double sum = 0.0;
  for (const Vec& v : m_values) sum += v.squaredNorm();
  return std::sqrt(sum);
}

VectorTensor spencer_delta(const VectorTensor& T) {
  require(T.slots() >= 2, Err::DimensionMismatch,
          "alternation needs at least one form slot beyond the map argument");
  const int n = T.v_dim();
  const int q = T.slots() - 1;
  VectorTensor out(n, T.slots());
  std::vector<int> idx(static_cast<std::size_t>(q) + 1, 0);
  while (true) {
    Vec val = Vec::Zero(n);
    double sign = 1.0;
    std::vector<int> arg(static_cast<std::size_t>(q) + 1);
    for (int i = 0; i <= q; ++i) {
      arg[0] = idx[static_cast<std::size_t>(i)];
      int at = 1;
      for (int j = 0; j <= q; ++j)
        if (j != i) arg[static_cast<std::size_t>(at++)] = idx[static_cast<std::size_t>(j)];
      val += sign * T.value(arg);
      sign = -sign;
    }
    out.set_value(idx, val);
    int s = q;
    while (s >= 0 && ++idx[static_cast<std::size_t>(s)] == n) idx[static_cast<std::size_t>(s--)] = 0;
    if (s < 0) break;
  }
  return out;
}

Vec two_form_flat(const VectorTensor& T) {
  require(T.slots() == 2, Err::DimensionMismatch, "two argument slots expected");
  const int n = T.v_dim();
  const auto pairs = index_pairs(n);
  Vec flat = Vec::Zero(static_cast<Eigen::Index>(pairs.size()) * n);
  for (std::size_t p = 0; p < pairs.size(); ++p)
    flat.segment(static_cast<Eigen::Index>(p) * n, n) = T.value({pairs[p].first, pairs[p].second});
  return flat;
}

VectorTensor two_form_from_flat(int v_dim, const Vec& flat) {
  const auto pairs = index_pairs(v_dim);
  require(flat.size() == static_cast<Eigen::Index>(pairs.size()) * v_dim, Err::DimensionMismatch,
          "flat two-form coordinates expected");
  VectorTensor T(v_dim, 2);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const Vec v = flat.segment(static_cast<Eigen::Index>(p) * v_dim, v_dim);
    T.set_value({pairs[p].first, pairs[p].second}, v);
    T.set_value({pairs[p].second, pairs[p].first}, Vec(-v));
  }
  return T;
}

std::vector<std::vector<int>> multiset_tuples(int n, int size) {
  require(n >= 1 && size >= 1, Err::InvalidArgument, "multiset shape");
  std::vector<std::vector<int>> out;
  std::vector<int> tuple(static_cast<std::size_t>(size), 0);
  while (true) {
    out.push_back(tuple);
    int s = size - 1;
    while (s >= 0 && tuple[static_cast<std::size_t>(s)] == n - 1) --s;
    if (s < 0) break;
    const int next = tuple[static_cast<std::size_t>(s)] + 1;
    for (int j = s; j < size; ++j) tuple[static_cast<std::size_t>(j)] = next;
  }
  return out;
}

Vec symmetric_value(int v_dim, int slots, const Vec& flat, std::vector<int> idx) {
  require(static_cast<int>(idx.size()) == slots, Err::DimensionMismatch, "tuple arity");
  const auto tuples = multiset_tuples(v_dim, slots);
  require(flat.size() == static_cast<Eigen::Index>(tuples.size()) * v_dim, Err::DimensionMismatch,
          "flat symmetric coordinates expected");
  std::sort(idx.begin(), idx.end());
  const auto at = std::find(tuples.begin(), tuples.end(), idx);
  require(at != tuples.end(), Err::InvalidArgument, "tuple index out of range");
  const auto offset = static_cast<Eigen::Index>(at - tuples.begin());
  return flat.segment(offset * v_dim, v_dim);
}

const char* to_string(ProlongationType t) {
  switch (t) {
    case ProlongationType::Type1: return "TYPE1";
    case ProlongationType::Type2: return "TYPE2";
    case ProlongationType::HigherOrInfinite: return "HIGHER_OR_INFINITE";
  }
  return "?";
}

int ProlongationTable::dim(int k) const {
  require(k >= 1 && k <= static_cast<int>(levels.size()), Err::InvalidArgument,
          "prolongation level out of range");
  return levels[static_cast<std::size_t>(k - 1)].dim();
}

std::vector<Vec> prolong_subspace(int v_dim, int slots, const std::vector<Vec>& basis,
                                  double* gap_ratio) {
  const int n = v_dim;
  const auto in_tuples = multiset_tuples(n, slots);
  const auto out_tuples = multiset_tuples(n, slots + 1);
  const int dim_in = static_cast<int>(in_tuples.size()) * n;
  const int dim_out = static_cast<int>(out_tuples.size()) * n;

  std::map<std::vector<int>, int> out_index;
  for (std::size_t a = 0; a < out_tuples.size(); ++a)
    out_index[out_tuples[a]] = static_cast<int>(a);

  Mat perp = Mat::Identity(dim_in, dim_in);
  if (!basis.empty()) {
    Mat B(dim_in, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t i = 0; i < basis.size(); ++i) {
      require(basis[i].size() == dim_in, Err::DimensionMismatch, "subspace basis coordinates");
      B.col(static_cast<Eigen::Index>(i)) = basis[i];
    }
    Eigen::JacobiSVD<Mat> svd(B, Eigen::ComputeFullU);
    const double smax = svd.singularValues()(0);
    int r = 0;
    while (r < svd.singularValues().size() && svd.singularValues()(r) > kRankTol * smax) ++r;
    const Mat Q = svd.matrixU().leftCols(r);
    perp -= Q * Q.transpose();
  }

  Mat C = Mat::Zero(static_cast<Eigen::Index>(n) * dim_in, dim_out);
  for (int j = 0; j < n; ++j) {
    Mat slice = Mat::Zero(dim_in, dim_out);
    for (std::size_t b = 0; b < in_tuples.size(); ++b) {
      std::vector<int> alpha = in_tuples[b];
      alpha.push_back(j);
      std::sort(alpha.begin(), alpha.end());
      const int a = out_index.at(alpha);
      for (int i = 0; i < n; ++i)
        slice(static_cast<Eigen::Index>(b) * n + i, static_cast<Eigen::Index>(a) * n + i) = 1.0;
    }
    C.middleRows(static_cast<Eigen::Index>(j) * dim_in, dim_in) = perp * slice;
  }
  return kernel_basis(C, dim_out, gap_ratio);
}

ProlongationTable prolong(const LinearLieAlgebra& g, int k_max) {
  require(k_max >= 1 && k_max <= 4, Err::InvalidArgument, "prolongation depth must be 1..4");
  const int n = g.v_dim();
  ProlongationTable table;
  table.v_dim = n;
  std::vector<Vec> prev;
  for (int mu = 0; mu < g.dim(); ++mu) {
    Vec f(n * n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) f[j * n + i] = g.basis(mu)(i, j);
    prev.push_back(f);
  }
  for (int k = 1; k <= k_max; ++k) {
    ProlongationLevel level;
    level.k = k;
    level.basis = prolong_subspace(n, k, prev, &level.gap_ratio);
    prev = level.basis;
    table.levels.push_back(std::move(level));
  }
  if (table.dim(1) == 0)
    table.type = ProlongationType::Type1;
  else if (k_max >= 2 && table.dim(2) == 0)
    table.type = ProlongationType::Type2;
  else
    table.type = ProlongationType::HigherOrInfinite;
  return table;
}

TorsionSplit torsion_complement(const LinearLieAlgebra& g, bool strict, int samples,
                                std::uint64_t seed) {
  const int n = g.v_dim();
  const AlternationSplit alt = split_alternation(g);
  TorsionSplit split;
  for (int i = 0; i < alt.image.cols(); ++i) split.image.push_back(Vec(alt.image.col(i)));
  for (int i = 0; i < alt.complement.cols(); ++i)
    split.complement.push_back(Vec(alt.complement.col(i)));

  if (g.dim() > 0 && !split.image.empty() && !split.complement.empty()) {
    RandomStream rng(seed);
    for (int s = 0; s < samples; ++s) {
      const Mat a = Mat(g.element(rng.vector(g.dim(), 0.5))).exp();
      for (const Vec& c : split.complement) {
        const Vec moved = two_form_flat(conjugate_two_form(a, two_form_from_flat(n, c)));
        const double leak = (alt.image.transpose() * moved).norm() / moved.norm();
        split.invariance_leakage = std::max(split.invariance_leakage, leak);
      }
    }
  }
  if (strict)
    require(split.invariance_leakage <= 1e-6, Err::NotGInvariant,
            g.name() + ": torsion complement moves under the group action");
  return split;
}

LocalGStructure::LocalGStructure(LinearLieAlgebra g, Box base,
                                 std::vector<std::vector<Polynomial>> frame)
    : m_g(std::move(g)), m_base(std::move(base)), m_frame(std::move(frame)) {
  const int n = m_g.v_dim();
  require(m_base.dim() == n, Err::DimensionMismatch, "base chart dimension must match V");
  require(static_cast<int>(m_frame.size()) == n, Err::DimensionMismatch, "frame rows");
  for (const auto& row : m_frame) {
    require(static_cast<int>(row.size()) == n, Err::DimensionMismatch, "frame columns");
    for (const Polynomial& p : row)
      require(p.nvars() == n, Err::DimensionMismatch, "frame entries must live on the base");
  }
  m_dframe.resize(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    auto& dv = m_dframe[static_cast<std::size_t>(v)];
    dv.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        dv[static_cast<std::size_t>(i)].push_back(m_frame[static_cast<std::size_t>(i)]
                                                          [static_cast<std::size_t>(j)]
                                                              .derivative(v));
  }
}

LocalGStructure LocalGStructure::flat(LinearLieAlgebra g, double radius) {
  const int n = g.v_dim();
  std::vector<std::vector<Polynomial>> frame(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      frame[static_cast<std::size_t>(i)].push_back(Polynomial::constant(n, i == j ? 1.0 : 0.0));
  return LocalGStructure(std::move(g), Box::cube(n, radius), std::move(frame));
}

Mat LocalGStructure::frame_at(const Vec& x) const {
  const int n = dim();
  require(x.size() == n, Err::DimensionMismatch, "base point dimension");
  Mat S(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      S(i, j) = m_frame[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].eval(x);
  return S;
}

Mat LocalGStructure::frame_derivative(const Vec& x, const Vec& dir) const {
  const int n = dim();
  require(x.size() == n && dir.size() == n, Err::DimensionMismatch, "base point dimension");
  Mat D = Mat::Zero(n, n);
  for (int v = 0; v < n; ++v) {
    if (dir[v] == 0.0) continue;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        D(i, j) += dir[v] *
                   m_dframe[static_cast<std::size_t>(v)][static_cast<std::size_t>(i)]
                           [static_cast<std::size_t>(j)]
                               .eval(x);
  }
  return D;
}

LocalGStructure LocalGStructure::translated(const Mat& a) const {
  const int n = dim();
  require(a.rows() == n && a.cols() == n, Err::DimensionMismatch, "group element dimension");
  std::vector<std::vector<Polynomial>> frame(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Polynomial entry(n);
      for (int k = 0; k < n; ++k)
        entry += m_frame[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] * a(k, j);
      frame[static_cast<std::size_t>(i)].push_back(std::move(entry));
    }
  return LocalGStructure(m_g, m_base, std::move(frame));
}

double LocalGStructure::min_frame_singular(int samples, std::uint64_t seed) const {
  double out = kInf;
  for (const Vec& x : sample_box(m_base, samples, seed)) {
    Eigen::JacobiSVD<Mat> svd(frame_at(x));
    out = std::min(out, svd.singularValues().minCoeff());
  }
  return out;
}

bool LocalGStructure::is_flat() const {
  const int n = dim();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Polynomial& p = m_frame[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (p.degree() > 0) return false;
      const double c = p.coefficient(std::vector<int>(static_cast<std::size_t>(n), 0));
      if (std::abs(c - (i == j ? 1.0 : 0.0)) > 1e-14) return false;
    }
  return true;
}

VectorTensor torsion_function(const LocalGStructure& s, const Vec& x, const Mat& H) {
  const int n = s.dim();
  const int dim_g = s.group().dim();
  require(H.rows() == dim_g && H.cols() == n, Err::DimensionMismatch,
          "horizontal map needs one algebra column per base direction");
  const Mat S = s.frame_at(x);
  Eigen::FullPivLU<Mat> lu(S);
  require(lu.isInvertible(), Err::SingularCoframe, "frame is singular at the sample point");

  std::vector<Mat> dcol(static_cast<std::size_t>(n));
  std::vector<Mat> hmat(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    dcol[static_cast<std::size_t>(v)] = s.frame_derivative(x, Vec(S.col(v)));
    hmat[static_cast<std::size_t>(v)] =
        dim_g > 0 ? s.group().element(Vec(H.col(v))) : Mat::Zero(n, n);
  }
  VectorTensor t(n, 2);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      Vec val = lu.solve(Vec(dcol[static_cast<std::size_t>(b)].col(a) -
                             dcol[static_cast<std::size_t>(a)].col(b)));
      val += hmat[static_cast<std::size_t>(b)].col(a) - hmat[static_cast<std::size_t>(a)].col(b);
      t.set_value({a, b}, val);
      t.set_value({b, a}, Vec(-val));
    }
  return t;
}

FirstProlongation first_prolongation_bundle(const LocalGStructure& s, int samples,
                                            std::uint64_t seed) {
  const LinearLieAlgebra& g = s.group();
  const int n = s.dim();
  const int dim_g = g.dim();

  FirstProlongation out;
  out.split = torsion_complement(g, false, 8, seed);
  const AlternationSplit alt = split_alternation(g);
  out.coset_directions = alt.kernel;
  out.coset_dim = static_cast<int>(alt.kernel.size());
  require(out.coset_dim == prolong(g, 1).dim(1), Err::InvalidStructure,
          "alternation kernel disagrees with the first prolongation");

  const Mat H0 = Mat::Zero(dim_g, n);
  RandomStream rng(seed);
  for (const Vec& x : sample_box(s.base(), samples, seed)) {
    const Vec f0 = two_form_flat(torsion_function(s, x, H0));
    const Mat H = reshape_horizontal(Vec(-alt.pinv * f0), dim_g, n);
    const Vec f1 = two_form_flat(torsion_function(s, x, H));
    if (alt.image.cols() > 0)
      require((alt.image.transpose() * f1).norm() <= 1e-8 * (1.0 + f0.norm()), Err::NoSolution,
              "no horizontal family reaches the torsion complement");
    out.base_points.push_back(x);
    out.horizontal.push_back(H);
    out.torsion_norm.push_back(f1.norm());

    if (dim_g == 0) continue;
    const Mat a = Mat(g.element(rng.vector(dim_g, 0.4))).exp();
    const LocalGStructure sa = s.translated(a);
    const Vec f0a = two_form_flat(torsion_function(sa, x, H0));
    const Mat Ha = reshape_horizontal(Vec(-alt.pinv * f0a), dim_g, n);
    const Vec moved = two_form_flat(torsion_function(sa, x, Ha));
    const Vec expected =
        two_form_flat(conjugate_two_form(Mat(a.inverse()), two_form_from_flat(n, f1)));
    const double defect = (moved - expected).norm() / (1.0 + f1.norm());
    out.theta1_equivariance = std::max(out.theta1_equivariance, defect);
  }
  return out;
}

CartanConnection type1_connection(const LocalGStructure& s, double fiber_radius) {
  const LinearLieAlgebra& g = s.group();
  const int n = s.dim();
  const ProlongationTable table = prolong(g, 1);
  require(table.type == ProlongationType::Type1, Err::NotType1,
          "first prolongation has dimension " + std::to_string(table.dim(1)));
  require(s.min_frame_singular() > 1e-8, Err::SingularCoframe,
          "frame field is singular on the base");
  if (g.dim() == 0) return coframe_parallelism(s);

  const MatrixRep rep_g = g.to_rep();
  const std::string g_name = rep_g.algebra().name();
  const LieAlgebra h = semidirect(rep_g, "affine_" + g_name);
  std::vector<Mat> gens;
  for (int a = 0; a < n; ++a) {
    Mat m = Mat::Zero(n + 1, n + 1);
    m(a, n) = 1.0;
    gens.push_back(m);
  }
  for (int mu = 0; mu < g.dim(); ++mu) {
    Mat m = Mat::Zero(n + 1, n + 1);
    m.topLeftCorner(n, n) = g.basis(mu);
    gens.push_back(m);
  }
  std::vector<Vec> sub;
  for (int mu = 0; mu < g.dim(); ++mu) sub.push_back(Vec::Unit(n + g.dim(), n + mu));
  const LocalModel model =
      LocalModel::principal(make_subalgebra(h, g_name, sub), MatrixRep(h, std::move(gens)),
                            s.base(), Box::cube(g.dim(), fiber_radius));

  const AlternationSplit alt = split_alternation(g);
  const Mat pinv = alt.pinv;
  const Mat H0 = Mat::Zero(g.dim(), n);
  auto A = [s, pinv, H0, n](const Vec& x) {
    const Mat Sinv = s.frame_at(x).inverse();
    const Vec f0 = two_form_flat(torsion_function(s, x, H0));
    const Mat H = reshape_horizontal(Vec(-pinv * f0), static_cast<int>(H0.rows()), n);
    Mat out(n + H0.rows(), n);
    out.topRows(n) = Sinv;
    out.bottomRows(H0.rows()) = -H * Sinv;
    return out;
  };
  return CartanConnection(model, make_principal_cartan(model, A).kappa());
}

CurvatureSplitting curvature_splitting(const LinearLieAlgebra& g) {
  const int n = g.v_dim();
  const int dim_g = g.dim();
  const auto pairs = index_pairs(n);
  const int npairs = static_cast<int>(pairs.size());
  const ProlongationTable table = prolong(g, 2);

  CurvatureSplitting out;
  out.dim_g_lambda2 = dim_g * npairs;
  out.dim_g_v = dim_g * n;
  out.dim_g1 = table.dim(1);
  out.dim_d3 = out.dim_g_v - out.dim_g1;

  std::vector<std::vector<int>> triples;
  for (int p = 0; p < n; ++p)
    for (int q = p + 1; q < n; ++q)
      for (int r = q + 1; r < n; ++r) triples.push_back({p, q, r});

  std::map<std::pair<int, int>, int> pair_index;
  for (int p = 0; p < npairs; ++p) pair_index[pairs[static_cast<std::size_t>(p)]] = p;

  Mat M1 = Mat::Zero(static_cast<Eigen::Index>(triples.size()) * n, out.dim_g_lambda2);
  for (int p = 0; p < npairs; ++p) {
    const auto [a, b] = pairs[static_cast<std::size_t>(p)];
    for (int mu = 0; mu < dim_g; ++mu) {
      const int col = p * dim_g + mu;
      for (std::size_t t = 0; t < triples.size(); ++t) {
        const auto& tri = triples[t];
        const auto row0 = static_cast<Eigen::Index>(t) * n;
        if (tri[1] == a && tri[2] == b) M1.block(row0, col, n, 1) += g.basis(mu).col(tri[0]);
        if (tri[0] == a && tri[2] == b) M1.block(row0, col, n, 1) -= g.basis(mu).col(tri[1]);
        if (tri[0] == a && tri[1] == b) M1.block(row0, col, n, 1) += g.basis(mu).col(tri[2]);
      }
    }
  }
  const int rank1 = matrix_rank(M1);
  out.dim_R = out.dim_g_lambda2 - rank1;
  out.dim_d1 = rank1;

  const auto& g1 = table.levels[0].basis;
  Mat M2 = Mat::Zero(out.dim_g_lambda2, static_cast<Eigen::Index>(g1.size()) * n);
  for (std::size_t alpha = 0; alpha < g1.size(); ++alpha) {
    std::vector<Mat> contraction(static_cast<std::size_t>(n));
    for (int c = 0; c < n; ++c) {
      Mat m(n, n);
      for (int r = 0; r < n; ++r) m.col(r) = symmetric_value(n, 2, g1[alpha], {r, c});
      contraction[static_cast<std::size_t>(c)] = m;
    }
    for (int j = 0; j < n; ++j) {
      const auto col = static_cast<Eigen::Index>(alpha) * n + j;
      for (int p = 0; p < npairs; ++p) {
        const auto [a, b] = pairs[static_cast<std::size_t>(p)];
        Mat m = Mat::Zero(n, n);
        if (a == j) m += contraction[static_cast<std::size_t>(b)];
        if (b == j) m -= contraction[static_cast<std::size_t>(a)];
        double resid = 0.0;
        const Vec coords = g.coordinates(m, &resid);
        require(resid <= 1e-8 * (1.0 + m.norm()), Err::InvalidStructure,
                "prolongation contraction leaves the algebra");
        for (int mu = 0; mu < dim_g; ++mu) M2(p * dim_g + mu, col) = coords[mu];
      }
    }
  }
  const int rank2 = matrix_rank(M2);
  out.dim_delta_g1 = rank2;
  out.dim_ker_delta2 = static_cast<int>(M2.cols()) - rank2;
  out.dim_d2 = out.dim_R - out.dim_delta_g1;
  if (M1.size() > 0 && M2.size() > 0 && M2.cols() > 0 && M1.cols() > 0) {
    const Mat composite = M1 * M2;
    out.g1_leakage = composite.size() > 0 ? composite.cwiseAbs().maxCoeff() : 0.0;
  }
  return out;
}

CartanConnection type2_connection(const LocalGStructure& s, double fiber_radius) {
  const LinearLieAlgebra& g = s.group();
  const int n = s.dim();
  const ProlongationTable table = prolong(g, 2);
  require(table.type == ProlongationType::Type2, Err::NotType2,
          "prolongation dims " + std::to_string(table.dim(1)) + ", " +
              std::to_string(table.dim(2)) + " do not terminate at level two");
  require(s.is_flat(), Err::UnsupportedCurvedBase,
          "the construction is implemented over the identity frame only");

  const LieAlgebra a2 = g_infinity_truncated(g, 2);
  const int fiber_dim = a2.dim() - n;
  Mat adspan(a2.dim() * a2.dim(), a2.dim());
  for (int i = 0; i < a2.dim(); ++i) {
    const Mat ad = a2.ad_basis(i);
    adspan.col(i) = Eigen::Map<const Vec>(ad.data(), ad.size());
  }
  require(matrix_rank(adspan) == a2.dim(), Err::InvalidStructure,
          a2.name() + ": symbol algebra has a center, no adjoint chart");

  std::vector<Vec> sub;
  for (int i = 0; i < fiber_dim; ++i) sub.push_back(Vec::Unit(a2.dim(), n + i));
  const std::string g_name = g.name().empty() ? "g" : g.name();
  const LocalModel model =
      LocalModel::principal(make_subalgebra(a2, "vert_" + g_name, sub), adjoint_rep(a2),
                            s.base(), Box::cube(fiber_dim, fiber_radius));
  Mat A = Mat::Zero(a2.dim(), n);
  A.topRows(n) = Mat::Identity(n, n);
  return CartanConnection(model, make_principal_cartan(model, [A](const Vec&) { return A; }).kappa());
}

} // namespace cartanlab
