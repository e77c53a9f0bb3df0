#include "cartanlab/multilinear.hpp"

#include <algorithm>
#include <cmath>

namespace cartanlab {

namespace {

std::size_t tensor_size(int dim, int arity) {
  std::size_t s = 1;
  for (int i = 0; i < arity; ++i) s *= static_cast<std::size_t>(dim);
  return s;
}

bool advance(std::vector<int>& idx, int dim) {
  for (int i = static_cast<int>(idx.size()) - 1; i >= 0; --i) {
    if (++idx[i] < dim) return true;
    idx[i] = 0;
  }
  return false;
}

} // namespace

MultilinearFunction::MultilinearFunction(int dim, int arity, Symmetry sym)
    : m_dim(dim), m_arity(arity), m_sym(sym), m_c(tensor_size(dim, arity), 0.0) {
  require(dim > 0 && arity >= 1, Err::InvalidArgument, "multilinear function shape");
}

std::size_t MultilinearFunction::flat(const std::vector<int>& idx) const {
  require(static_cast<int>(idx.size()) == m_arity, Err::DimensionMismatch, "index tuple");
  std::size_t f = 0;
  for (int i : idx) {
    require(i >= 0 && i < m_dim, Err::InvalidArgument, "index range");
    f = f * static_cast<std::size_t>(m_dim) + static_cast<std::size_t>(i);
  }
  return f;
}

double MultilinearFunction::eval(const std::vector<Vec>& args) const {
  require(static_cast<int>(args.size()) == m_arity, Err::DimensionMismatch, "argument count");
  for (const Vec& a : args)
    require(a.size() == m_dim, Err::DimensionMismatch, "argument size");
  double out = 0.0;
  std::vector<int> idx(m_arity, 0);
  std::size_t f = 0;
  do {
    const double c = m_c[f];
    if (c != 0.0) {
      double t = c;
      for (int i = 0; i < m_arity; ++i) t *= args[static_cast<std::size_t>(i)][idx[i]];
      out += t;
    }
    ++f;
  } while (advance(idx, m_dim));
  return out;
}

double MultilinearFunction::symmetry_residual() const {
  if (m_sym == Symmetry::None || m_arity == 1) return 0.0;
  double r = 0.0;
  std::vector<int> idx(m_arity, 0);
  do {
    const double v = coefficient(idx);
    for (int s = 0; s + 1 < m_arity; ++s) {
      std::vector<int> jdx = idx;
      std::swap(jdx[s], jdx[s + 1]);
      const double w = coefficient(jdx);
      r = std::max(r, m_sym == Symmetry::Symmetric ? std::abs(v - w) : std::abs(v + w));
    }
  } while (advance(idx, m_dim));
  return r;
}

double MultilinearFunction::max_abs_coefficient() const {
  double m = 0.0;
  for (double c : m_c) m = std::max(m, std::abs(c));
  return m;
}

void MultilinearFunction::for_each_nonzero(
    const std::function<void(const std::vector<int>&, double)>& fn) const {
  std::vector<int> idx(m_arity, 0);
  std::size_t f = 0;
  do {
    if (m_c[f] != 0.0) fn(idx, m_c[f]);
    ++f;
  } while (advance(idx, m_dim));
}

MultilinearFunction killing_form(const LieAlgebra& L) {
  MultilinearFunction f(L.dim(), 2, Symmetry::Symmetric);
  const Mat k = L.killing_matrix();
  for (int i = 0; i < L.dim(); ++i)
    for (int j = 0; j < L.dim(); ++j) f.set_coefficient({i, j}, k(i, j));
  return f;
}

MultilinearFunction trace_power_form(const MatrixRep& rep, int power) {
  require(power >= 1 && power <= 4, Err::InvalidArgument, "trace power in 1..4");
  const int n = rep.algebra().dim();
  // Raw tuple traces tr(rho_{i_1} ... rho_{i_k}), filled by prefix recursion.
  MultilinearFunction raw(n, power, Symmetry::None);
  std::vector<int> idx(power, 0);
  std::function<void(int, const Mat&)> rec = [&](int depth, const Mat& prefix) {
    if (depth == power) {
      raw.set_coefficient(idx, prefix.trace());
      return;
    }
    for (int i = 0; i < n; ++i) {
      idx[depth] = i;
      rec(depth + 1, Mat(prefix * rep.generator(i)));
    }
  };
  rec(0, Mat::Identity(rep.mat_dim(), rep.mat_dim()));

  MultilinearFunction f(n, power, Symmetry::Symmetric);
  std::vector<int> perm(power);
  for (int i = 0; i < power; ++i) perm[i] = i;
  double fact = 1.0;
  for (int i = 2; i <= power; ++i) fact *= i;
  std::vector<int> t(power, 0);
  do {
    double acc = 0.0;
    do {
      std::vector<int> p(power);
      for (int i = 0; i < power; ++i) p[i] = t[perm[i]];
      acc += raw.coefficient(p);
    } while (std::next_permutation(perm.begin(), perm.end()));
    f.set_coefficient(t, acc / fact);
  } while (advance(t, n));
  return f;
}

double invariance_residual(const LieAlgebra& L, const MultilinearFunction& f) {
  require(f.dim() == L.dim(), Err::DimensionMismatch, "function does not match algebra");
  const int k = f.arity();
  double r = 0.0;
  std::vector<int> idx(k, 0);
  do {
    for (int z = 0; z < L.dim(); ++z) {
      double acc = 0.0;
      for (int slot = 0; slot < k; ++slot) {
        const Mat& ad_z = L.ad_basis(z);
        for (int m = 0; m < L.dim(); ++m) {
          const double c = ad_z(m, idx[slot]);
          if (c == 0.0) continue;
          std::vector<int> jdx = idx;
          jdx[slot] = m;
          acc += c * f.coefficient(jdx);
        }
      }
      r = std::max(r, std::abs(acc));
    }
  } while (advance(idx, L.dim()));
  return r;
}

MultilinearFunction ce_differential(const LieAlgebra& L, const MultilinearFunction& f) {
  require(f.dim() == L.dim(), Err::DimensionMismatch, "function does not match algebra");
  require(f.arity() == 1 || f.symmetry() == Symmetry::Alternating, Err::InvalidArgument,
          "differential needs an alternating function");
  const int k = f.arity();
  MultilinearFunction out(L.dim(), k + 1, Symmetry::Alternating);
  if (k + 1 > L.dim()) return out; // nothing alternating above the dimension
  std::vector<int> idx(k + 1, 0);
  do {
    double acc = 0.0;
    for (int i = 0; i <= k; ++i)
      for (int j = i + 1; j <= k; ++j) {
        std::vector<int> rest;
        rest.reserve(static_cast<std::size_t>(k));
        rest.push_back(0); // placeholder for the bracket slot
        for (int s = 0; s <= k; ++s)
          if (s != i && s != j) rest.push_back(idx[s]);
        const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
        for (int m = 0; m < L.dim(); ++m) {
          const double c = L.structure_constant(idx[i], idx[j], m);
          if (c == 0.0) continue;
          rest[0] = m;
          acc += sign * c * f.coefficient(rest);
        }
      }
    out.set_coefficient(idx, acc);
  } while (advance(idx, L.dim()));
  return out;
}

} // namespace cartanlab
