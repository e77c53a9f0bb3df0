#include "cartanlab/form_field.hpp"

#include <algorithm>
#include <cmath>

#include "cartanlab/error.hpp"
#include "cartanlab/sampling.hpp"

namespace cartanlab {

namespace {

void check_index_key(const std::vector<int>& key, int degree, int n) {
  require(static_cast<int>(key.size()) == degree, Err::InvalidArgument,
          "index tuple size does not match form degree");
  for (std::size_t l = 0; l < key.size(); ++l) {
    require(key[l] >= 0 && key[l] < n, Err::InvalidArgument, "form index out of range");
    require(l == 0 || key[l] > key[l - 1], Err::InvalidArgument,
            "form index tuples must be strictly increasing");
  }
}

bool all_zero(const std::vector<Polynomial>& v) {
  for (const auto& p : v)
    if (p.degree() >= 0) return false;
  return true;
}

/// Parity sign of the concatenation of the (internally increasing, disjoint)
/// blocks relative to the fully sorted order.
double interleave_sign(const std::vector<std::vector<int>>& blocks) {
  int inversions = 0;
  for (std::size_t a = 0; a < blocks.size(); ++a)
    for (std::size_t b = a + 1; b < blocks.size(); ++b)
      for (int i : blocks[a])
        for (int j : blocks[b])
          if (j < i) ++inversions;
  return (inversions % 2 == 0) ? 1.0 : -1.0;
}

std::vector<int> merged_key(const std::vector<std::vector<int>>& blocks) {
  std::vector<int> key;
  for (const auto& b : blocks) key.insert(key.end(), b.begin(), b.end());
  std::sort(key.begin(), key.end());
  return key;
}

void for_each_combination(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  if (k > n) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
  }
}

void split_rec(const std::vector<int>& remaining, const std::vector<int>& sizes, std::size_t slot,
               std::vector<std::vector<int>>& blocks,
               const std::function<void(const std::vector<std::vector<int>>&, double)>& fn) {
  if (slot == sizes.size()) {
    fn(blocks, interleave_sign(blocks));
    return;
  }
  for_each_combination(static_cast<int>(remaining.size()), sizes[slot],
                       [&](const std::vector<int>& pick) {
                         std::vector<int> chosen;
                         std::vector<int> rest;
                         std::size_t p = 0;
                         for (std::size_t i = 0; i < remaining.size(); ++i) {
                           if (p < pick.size() && static_cast<int>(i) == pick[p]) {
                             chosen.push_back(remaining[i]);
                             ++p;
                           } else {
                             rest.push_back(remaining[i]);
                           }
                         }
                         blocks[slot] = std::move(chosen);
                         split_rec(rest, sizes, slot + 1, blocks, fn);
                       });
}

} // namespace

void for_each_split(int total, const std::vector<int>& sizes,
                    const std::function<void(const std::vector<std::vector<int>>&, double)>& fn) {
  int used = 0;
  for (int s : sizes) used += s;
  require(used == total, Err::InvalidArgument, "split sizes must partition the argument list");
  std::vector<int> all(total);
  for (int i = 0; i < total; ++i) all[i] = i;
  std::vector<std::vector<int>> blocks(sizes.size());
  split_rec(all, sizes, 0, blocks, fn);
}

Vec directional_derivative(const std::function<Vec(const Vec&)>& fn, const Vec& x,
                           const Vec& dir, int depth) {
  const double scale = dir.norm();
  if (scale == 0.0) return Vec::Zero(fn(x).size());
  const Vec u = dir / scale;
  const double step = (depth == 0 ? 1e-4 : 1e-3) * (1.0 + x.norm());
  const Vec f1 = fn(x + 2.0 * step * u);
  const Vec f2 = fn(x + step * u);
  const Vec f3 = fn(x - step * u);
  const Vec f4 = fn(x - 2.0 * step * u);
  return scale / (12.0 * step) * (-f1 + 8.0 * f2 - 8.0 * f3 + f4);
}

Mat ChartMap::jacobian_at(const Vec& x) const {
  if (jacobian) return jacobian(x);
  const int n = domain.dim();
  Mat J(codim, n);
  for (int j = 0; j < n; ++j)
    J.col(j) = directional_derivative(eval, x, Vec::Unit(n, j), 0);
  return J;
}

FormField FormField::poly(Box domain, int degree, int target_dim, Coefficients coef) {
  require(degree >= 0 && target_dim >= 1, Err::InvalidArgument, "bad form degree or target size");
  FormField f;
  f.m_backend = Backend::Poly;
  f.m_domain = std::move(domain);
  f.m_degree = degree;
  f.m_target_dim = target_dim;
  const int n = f.chart_dim();
  for (auto& [key, val] : coef) {
    check_index_key(key, degree, n);
    require(static_cast<int>(val.size()) == target_dim, Err::InvalidArgument,
            "coefficient vector size does not match target");
    for (const auto& p : val)
      require(p.nvars() == n, Err::DimensionMismatch,
              "coefficient polynomials must use the chart's variables");
    if (!all_zero(val)) f.m_coef.emplace(key, std::move(val));
  }
  return f;
}

FormField FormField::poly_zero(Box domain, int degree, int target_dim) {
  return poly(std::move(domain), degree, target_dim, {});
}

FormField FormField::sampled(Box domain, int degree, int target_dim, Evaluator eval,
                             int derivative_depth) {
  require(degree >= 0 && target_dim >= 1, Err::InvalidArgument, "bad form degree or target size");
  require(static_cast<bool>(eval), Err::InvalidArgument, "sampled form needs an evaluator");
  FormField f;
  f.m_backend = Backend::Sampled;
  f.m_domain = std::move(domain);
  f.m_degree = degree;
  f.m_target_dim = target_dim;
  f.m_depth = derivative_depth;
  f.m_eval = std::move(eval);
  return f;
}

Vec FormField::eval(const Vec& x, const std::vector<Vec>& args) const {
  require(x.size() == chart_dim(), Err::DimensionMismatch, "point size does not match chart");
  require(static_cast<int>(args.size()) == m_degree, Err::InvalidArgument,
          "form of degree p takes p vector arguments");
  for (const auto& v : args)
    require(v.size() == chart_dim(), Err::DimensionMismatch, "argument size does not match chart");
  if (m_backend == Backend::Sampled) return m_eval(x, args);

  Vec out = Vec::Zero(m_target_dim);
  const int p = m_degree;
  Mat minor(p, p);
  for (const auto& [key, val] : m_coef) {
    for (int l = 0; l < p; ++l)
      for (int j = 0; j < p; ++j) minor(l, j) = args[j](key[l]);
    const double det = (p == 0) ? 1.0 : minor.determinant();
    if (det == 0.0) continue;
    for (int c = 0; c < m_target_dim; ++c) out(c) += det * val[c].eval(x);
  }
  return out;
}

Mat FormField::coefficient_matrix(const Vec& x) const {
  require(m_degree == 1, Err::InvalidArgument, "coefficient_matrix needs a 1-form");
  const int n = chart_dim();
  Mat M(m_target_dim, n);
  for (int j = 0; j < n; ++j) M.col(j) = eval(x, {Vec::Unit(n, j)});
  return M;
}

const FormField::Coefficients& FormField::coefficients() const {
  require(m_backend == Backend::Poly, Err::BackendUnsupported,
          "coefficient access needs the polynomial backend");
  return m_coef;
}

FormField::Evaluator FormField::as_evaluator() const {
  if (m_backend == Backend::Sampled) return m_eval;
  FormField copy = *this;
  return [copy](const Vec& x, const std::vector<Vec>& args) { return copy.eval(x, args); };
}

FormField operator+(const FormField& a, const FormField& b) {
  require(a.degree() == b.degree() && a.target_dim() == b.target_dim() &&
              a.chart_dim() == b.chart_dim(),
          Err::DimensionMismatch, "form sum needs matching degree and sizes");
  if (a.m_backend == Backend::Poly && b.m_backend == Backend::Poly) {
    FormField::Coefficients coef = a.m_coef;
    for (const auto& [key, val] : b.m_coef) {
      auto it = coef.find(key);
      if (it == coef.end()) {
        coef.emplace(key, val);
      } else {
        for (int c = 0; c < a.target_dim(); ++c) it->second[c] += val[c];
      }
    }
    return FormField::poly(a.domain(), a.degree(), a.target_dim(), std::move(coef));
  }
  auto ea = a.as_evaluator();
  auto eb = b.as_evaluator();
  return FormField::sampled(
      a.domain(), a.degree(), a.target_dim(),
      [ea, eb](const Vec& x, const std::vector<Vec>& args) {
        return Vec(ea(x, args) + eb(x, args));
      },
      std::max(a.derivative_depth(), b.derivative_depth()));
}

FormField operator-(const FormField& a, const FormField& b) { return a + (-1.0) * b; }

FormField operator*(double s, const FormField& f) {
  if (f.m_backend == Backend::Poly) {
    FormField::Coefficients coef = f.m_coef;
    for (auto& [key, val] : coef)
      for (auto& p : val) p *= s;
    return FormField::poly(f.domain(), f.degree(), f.target_dim(), std::move(coef));
  }
  auto ev = f.as_evaluator();
  return FormField::sampled(
      f.domain(), f.degree(), f.target_dim(),
      [ev, s](const Vec& x, const std::vector<Vec>& args) { return Vec(s * ev(x, args)); },
      f.derivative_depth());
}

FormField exterior_derivative(const FormField& f) {
  const int n = f.chart_dim();
  const int p = f.degree();
  if (p + 1 > n) return FormField::poly_zero(f.domain(), p + 1, f.target_dim());

  if (f.backend() == Backend::Poly) {
    FormField::Coefficients out;
    for (const auto& [key, val] : f.coefficients()) {
      for (int j = 0; j < n; ++j) {
        if (std::binary_search(key.begin(), key.end(), j)) continue;
        int before = 0;
        while (before < p && key[before] < j) ++before;
        const double sign = (before % 2 == 0) ? 1.0 : -1.0;
        std::vector<int> new_key = key;
        new_key.insert(new_key.begin() + before, j);
        auto& slot = out[new_key];
        if (slot.empty()) slot.assign(f.target_dim(), Polynomial(n));
        for (int c = 0; c < f.target_dim(); ++c) {
          Polynomial d = val[c].derivative(j);
          d *= sign;
          slot[c] += d;
        }
      }
    }
    return FormField::poly(f.domain(), p + 1, f.target_dim(), std::move(out));
  }

  auto ev = f.as_evaluator();
  const int depth = f.derivative_depth();
  auto out = [ev, depth](const Vec& x, const std::vector<Vec>& args) {
    Vec acc;
    for (std::size_t i = 0; i < args.size(); ++i) {
      std::vector<Vec> rest;
      rest.reserve(args.size() - 1);
      for (std::size_t j = 0; j < args.size(); ++j)
        if (j != i) rest.push_back(args[j]);
      Vec term = directional_derivative(
          [&ev, &rest](const Vec& y) { return ev(y, rest); }, x, args[i], depth);
      if (i % 2 == 1) term = -term;
      acc = (i == 0) ? term : Vec(acc + term);
    }
    return acc;
  };
  return FormField::sampled(f.domain(), p + 1, f.target_dim(), out, depth + 1);
}

namespace {

/// Shuffle-combine two forms through a bilinear product on target values.
/// PolyProduct: (const std::vector<Polynomial>&, const std::vector<Polynomial>&)
///   -> std::vector<Polynomial> of size out_dim.
/// VecProduct: (const Vec&, const Vec&) -> Vec of size out_dim.
template <class PolyProduct, class VecProduct>
FormField combine_forms(const FormField& a, const FormField& b, int out_dim,
                        PolyProduct poly_product, VecProduct vec_product) {
  require(a.chart_dim() == b.chart_dim(), Err::DimensionMismatch,
          "forms live on charts of different dimension");
  const int p = a.degree();
  const int q = b.degree();
  const int n = a.chart_dim();
  if (p + q > n) return FormField::poly_zero(a.domain(), p + q, out_dim);

  if (a.backend() == Backend::Poly && b.backend() == Backend::Poly) {
    FormField::Coefficients out;
    for (const auto& [ka, va] : a.coefficients()) {
      for (const auto& [kb, vb] : b.coefficients()) {
        bool disjoint = true;
        for (int i : ka)
          if (std::binary_search(kb.begin(), kb.end(), i)) {
            disjoint = false;
            break;
          }
        if (!disjoint) continue;
        const double sign = interleave_sign({ka, kb});
        std::vector<Polynomial> prod = poly_product(va, vb);
        auto& slot = out[merged_key({ka, kb})];
        if (slot.empty()) slot.assign(out_dim, Polynomial(n));
        for (int c = 0; c < out_dim; ++c) {
          prod[c] *= sign;
          slot[c] += prod[c];
        }
      }
    }
    return FormField::poly(a.domain(), p + q, out_dim, std::move(out));
  }

  auto ea = a.as_evaluator();
  auto eb = b.as_evaluator();
  auto out = [ea, eb, p, q, out_dim, vec_product](const Vec& x, const std::vector<Vec>& args) {
    Vec acc = Vec::Zero(out_dim);
    for_each_split(p + q, {p, q},
                   [&](const std::vector<std::vector<int>>& blocks, double sign) {
                     std::vector<Vec> left, right;
                     for (int i : blocks[0]) left.push_back(args[i]);
                     for (int i : blocks[1]) right.push_back(args[i]);
                     acc += sign * vec_product(ea(x, left), eb(x, right));
                   });
    return acc;
  };
  return FormField::sampled(a.domain(), p + q, out_dim, out,
                            std::max(a.derivative_depth(), b.derivative_depth()));
}

} // namespace

FormField wedge_bracket(const FormField& phi, const FormField& psi, const LieAlgebra& L) {
  const int d = L.dim();
  require(phi.target_dim() == d && psi.target_dim() == d, Err::DimensionMismatch,
          "wedge bracket arguments must take values in the given algebra");
  auto poly_product = [&L, d](const std::vector<Polynomial>& a, const std::vector<Polynomial>& b) {
    std::vector<Polynomial> out(d, Polynomial(a.front().nvars()));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const Vec br = L.ad_basis(i).col(j);
        if (br.isZero(0.0)) continue;
        const Polynomial ab = a[i] * b[j];
        for (int k = 0; k < d; ++k) {
          if (br(k) == 0.0) continue;
          Polynomial t = ab;
          t *= br(k);
          out[k] += t;
        }
      }
    return out;
  };
  LieAlgebra Lc = L;
  auto vec_product = [Lc](const Vec& a, const Vec& b) { return Lc.bracket(a, b); };
  return combine_forms(phi, psi, d, poly_product, vec_product);
}

FormField rho_wedge(const FormField& kappa, const MatrixRep& rho, const FormField& psi) {
  require(kappa.degree() == 1, Err::InvalidArgument, "rho_wedge expects a 1-form connection slot");
  require(kappa.target_dim() == rho.algebra().dim(), Err::DimensionMismatch,
          "connection form must take values in the representation's algebra");
  const int m = static_cast<int>(rho.generator(0).rows());
  require(psi.target_dim() == m, Err::DimensionMismatch,
          "form values must live in the representation space");
  const int d = rho.algebra().dim();
  auto poly_product = [&rho, d, m](const std::vector<Polynomial>& a,
                                   const std::vector<Polynomial>& b) {
    std::vector<Polynomial> out(m, Polynomial(a.front().nvars()));
    for (int i = 0; i < d; ++i) {
      const Mat& G = rho.generator(i);
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) {
          if (G(r, c) == 0.0) continue;
          Polynomial t = a[i] * b[c];
          t *= G(r, c);
          out[r] += t;
        }
    }
    return out;
  };
  MatrixRep rho_c = rho;
  auto vec_product = [rho_c](const Vec& a, const Vec& b) { return Vec(rho_c.map(a) * b); };
  return combine_forms(kappa, psi, m, poly_product, vec_product);
}

FormField apply_multilinear(const MultilinearFunction& f, const std::vector<FormField>& psi) {
  const int k = f.arity();
  require(static_cast<int>(psi.size()) == k, Err::InvalidArgument,
          "need one form per slot of the multilinear function");
  require(k >= 1, Err::InvalidArgument, "multilinear application needs at least one slot");
  const int n = psi[0].chart_dim();
  int total = 0;
  bool all_poly = true;
  std::vector<int> sizes(k);
  for (int j = 0; j < k; ++j) {
    require(psi[j].chart_dim() == n, Err::DimensionMismatch, "forms live on different charts");
    require(psi[j].target_dim() == f.dim(), Err::DimensionMismatch,
            "form values must match the multilinear function's space");
    sizes[j] = psi[j].degree();
    total += sizes[j];
    all_poly = all_poly && psi[j].backend() == Backend::Poly;
  }
  if (total > n) return FormField::poly_zero(psi[0].domain(), total, 1);

  if (all_poly) {
    FormField::Coefficients out;
    std::vector<const FormField::Coefficients::value_type*> pick(k);
    std::function<void(int)> rec = [&](int slot) {
      if (slot == k) {
        std::vector<std::vector<int>> blocks(k);
        for (int j = 0; j < k; ++j) blocks[j] = pick[j]->first;
        std::vector<int> key = merged_key(blocks);
        for (std::size_t l = 1; l < key.size(); ++l)
          if (key[l] == key[l - 1]) return;
        const double sign = interleave_sign(blocks);
        Polynomial acc(n);
        f.for_each_nonzero([&](const std::vector<int>& idx, double c) {
          Polynomial term = Polynomial::constant(n, c * sign);
          for (int j = 0; j < k; ++j) term = term * pick[j]->second[idx[j]];
          acc += term;
        });
        if (acc.degree() >= 0) {
          auto& slot_vec = out[key];
          if (slot_vec.empty()) slot_vec.assign(1, Polynomial(n));
          slot_vec[0] += acc;
        }
        return;
      }
      for (const auto& entry : psi[slot].coefficients()) {
        pick[slot] = &entry;
        rec(slot + 1);
      }
    };
    rec(0);
    return FormField::poly(psi[0].domain(), total, 1, std::move(out));
  }

  std::vector<FormField::Evaluator> evs;
  int depth = 0;
  for (const auto& g : psi) {
    evs.push_back(g.as_evaluator());
    depth = std::max(depth, g.derivative_depth());
  }
  MultilinearFunction fc = f;
  auto out = [fc, evs, sizes, total](const Vec& x, const std::vector<Vec>& args) {
    double acc = 0.0;
    for_each_split(total, sizes, [&](const std::vector<std::vector<int>>& blocks, double sign) {
      std::vector<Vec> values(evs.size());
      for (std::size_t j = 0; j < evs.size(); ++j) {
        std::vector<Vec> slot_args;
        for (int i : blocks[j]) slot_args.push_back(args[i]);
        values[j] = evs[j](x, slot_args);
      }
      acc += sign * fc.eval(values);
    });
    Vec v(1);
    v(0) = acc;
    return v;
  };
  return FormField::sampled(psi[0].domain(), total, 1, out, depth);
}

FormField pullback(const ChartMap& map, const FormField& f) {
  require(map.codim == f.chart_dim(), Err::DimensionMismatch,
          "chart map target does not match the form's chart");
  ChartMap m = map;
  auto ev = f.as_evaluator();
  const int depth = f.derivative_depth() + (map.jacobian ? 0 : 1);
  auto out = [m, ev](const Vec& x, const std::vector<Vec>& args) {
    const Vec y = m.eval(x);
    const Mat J = m.jacobian_at(x);
    std::vector<Vec> pushed;
    pushed.reserve(args.size());
    for (const auto& v : args) pushed.emplace_back(J * v);
    return ev(y, pushed);
  };
  return FormField::sampled(map.domain, f.degree(), f.target_dim(), out, depth);
}

FormField postcompose(const Mat& M, const FormField& f) {
  require(M.cols() == f.target_dim(), Err::DimensionMismatch,
          "linear map does not accept the form's values");
  const int out_dim = static_cast<int>(M.rows());
  if (f.backend() == Backend::Poly) {
    const int n = f.chart_dim();
    FormField::Coefficients out;
    for (const auto& [key, val] : f.coefficients()) {
      std::vector<Polynomial> v(out_dim, Polynomial(n));
      for (int r = 0; r < out_dim; ++r)
        for (int c = 0; c < f.target_dim(); ++c) {
          if (M(r, c) == 0.0) continue;
          Polynomial t = val[c];
          t *= M(r, c);
          v[r] += t;
        }
      out.emplace(key, std::move(v));
    }
    return FormField::poly(f.domain(), f.degree(), out_dim, std::move(out));
  }
  auto ev = f.as_evaluator();
  Mat Mc = M;
  return FormField::sampled(
      f.domain(), f.degree(), out_dim,
      [ev, Mc](const Vec& x, const std::vector<Vec>& args) { return Vec(Mc * ev(x, args)); },
      f.derivative_depth());
}

double multilinearity_residual(const FormField& f, int samples, std::uint64_t seed) {
  if (f.backend() == Backend::Poly || f.degree() == 0) return 0.0;
  const int n = f.chart_dim();
  RandomStream rng(seed);
  const auto points = sample_box(f.domain(), samples, seed);
  double worst = 0.0;
  for (const auto& x : points) {
    std::vector<Vec> args;
    for (int j = 0; j < f.degree(); ++j) args.push_back(rng.vector(n, 1.0));
    const Vec a = rng.vector(n, 1.0);
    const Vec b = rng.vector(n, 1.0);
    const double lam = rng.uniform(-2.0, 2.0);
    for (int slot = 0; slot < f.degree(); ++slot) {
      std::vector<Vec> lhs = args, va = args, vb = args;
      lhs[slot] = a + lam * b;
      va[slot] = a;
      vb[slot] = b;
      const Vec r = f.eval(x, lhs) - f.eval(x, va) - lam * f.eval(x, vb);
      worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

double alternation_residual(const FormField& f, int samples, std::uint64_t seed) {
  if (f.backend() == Backend::Poly || f.degree() < 2) return 0.0;
  const int n = f.chart_dim();
  RandomStream rng(seed);
  const auto points = sample_box(f.domain(), samples, seed);
  double worst = 0.0;
  for (const auto& x : points) {
    std::vector<Vec> args;
    for (int j = 0; j < f.degree(); ++j) args.push_back(rng.vector(n, 1.0));
    for (int slot = 0; slot + 1 < f.degree(); ++slot) {
      std::vector<Vec> swapped = args;
      std::swap(swapped[slot], swapped[slot + 1]);
      const Vec r = f.eval(x, args) + f.eval(x, swapped);
      worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

double sup_norm(const FormField& f, const std::vector<Vec>& points) {
  const int n = f.chart_dim();
  double worst = 0.0;
  for (const auto& x : points) {
    for_each_combination(n, f.degree(), [&](const std::vector<int>& idx) {
      std::vector<Vec> args;
      for (int i : idx) args.push_back(Vec::Unit(n, i));
      const Vec v = f.eval(x, args);
      worst = std::max(worst, v.cwiseAbs().maxCoeff());
    });
  }
  return worst;
}

} // namespace cartanlab
