#include <doctest.h>

#include <cmath>
#include <functional>

#include "cartanlab/error.hpp"
#include "cartanlab/form_field.hpp"
#include "cartanlab/presets.hpp"
#include "cartanlab/sampling.hpp"

using namespace cartanlab;

namespace {

Polynomial random_poly(int nvars, int max_degree, RandomStream& rng) {
  Polynomial p(nvars);
  std::vector<int> e(nvars, 0);
  std::function<void(int, int)> rec = [&](int i, int left) {
    if (i == nvars) {
      p.add_term(e, rng.uniform(-1.0, 1.0));
      return;
    }
    for (int k = 0; k <= left; ++k) {
      e[i] = k;
      rec(i + 1, left - k);
    }
    e[i] = 0;
  };
  rec(0, max_degree);
  return p;
}

FormField random_poly_form(const Box& box, int degree, int target, int max_poly_degree,
                           RandomStream& rng) {
  const int n = box.dim();
  FormField::Coefficients coef;
  std::vector<int> idx(degree);
  std::function<void(int, int)> rec = [&](int slot, int start) {
    if (slot == degree) {
      std::vector<Polynomial> v;
      for (int c = 0; c < target; ++c) v.push_back(random_poly(n, max_poly_degree, rng));
      coef[idx] = v;
      return;
    }
    for (int i = start; i < n; ++i) {
      idx[slot] = i;
      rec(slot + 1, i + 1);
    }
  };
  rec(0, 0);
  return FormField::poly(box, degree, target, coef);
}

double max_abs_coef(const FormField& f) {
  double worst = 0.0;
  for (const auto& [key, val] : f.coefficients())
    for (const auto& p : val) worst = std::max(worst, p.max_abs_coefficient());
  return worst;
}

double max_eval_diff(const FormField& a, const FormField& b, int samples, std::uint64_t seed) {
  RandomStream rng(seed + 1);
  double worst = 0.0;
  for (const Vec& x : sample_box(a.domain(), samples, seed)) {
    std::vector<Vec> args;
    for (int j = 0; j < a.degree(); ++j) args.push_back(rng.vector(a.chart_dim(), 1.0));
    const Vec d = a.eval(x, args) - b.eval(x, args);
    worst = std::max(worst, d.cwiseAbs().maxCoeff());
  }
  return worst;
}

} // namespace

TEST_CASE("two-form evaluation follows the determinant convention") {
  const Box box = Box::cube(3, 1.0);
  FormField::Coefficients coef;
  coef[{0, 1}] = {Polynomial::variable(3, 0)};
  const FormField w = FormField::poly(box, 2, 1, coef);

  Vec x(3), v(3), u(3);
  x << 2.0, 0.5, -1.0;
  v << 1.0, 2.0, 3.0;
  u << 4.0, 5.0, 6.0;
  // x0 * (v0 u1 - v1 u0) = 2 * (5 - 8)
  CHECK(w.eval(x, {v, u})(0) == doctest::Approx(-6.0).epsilon(1e-14));
  CHECK(w.eval(x, {u, v})(0) == doctest::Approx(6.0).epsilon(1e-14));
}

TEST_CASE("exterior derivative of a polynomial form matches the hand computation") {
  const Box box = Box::cube(2, 1.0);
  FormField::Coefficients coef;
  Polynomial y2 = Polynomial::variable(2, 1) * Polynomial::variable(2, 1);
  coef[{0}] = {y2};
  const FormField w = FormField::poly(box, 1, 1, coef);

  const FormField dw = exterior_derivative(w);
  // d(y^2 dx) = 2y dy ^ dx = -2y dx ^ dy
  Vec x(2);
  x << 0.7, 0.3;
  CHECK(dw.eval(x, {Vec::Unit(2, 0), Vec::Unit(2, 1)})(0) == doctest::Approx(-0.6).epsilon(1e-14));

  const auto& terms = dw.coefficients();
  REQUIRE(terms.size() == 1);
  const auto& [key, val] = *terms.begin();
  CHECK(key == std::vector<int>{0, 1});
  CHECK(val[0].coefficient({0, 1}) == doctest::Approx(-2.0));
}

TEST_CASE("d of d vanishes identically on polynomial coefficients") {
  RandomStream rng(kDefaultSeed);
  const Box box = Box::cube(3, 1.0);
  for (int trial = 0; trial < 3; ++trial) {
    const FormField w = random_poly_form(box, 1, 2, 3, rng);
    const FormField ddw = exterior_derivative(exterior_derivative(w));
    CHECK(max_abs_coef(ddw) <= 1e-13);
  }
}

TEST_CASE("stencil exterior derivative agrees with the exact one") {
  RandomStream rng(kDefaultSeed);
  const Box box = Box::cube(3, 1.0);
  const FormField w = random_poly_form(box, 1, 2, 3, rng);
  const FormField ws = FormField::sampled(box, 1, 2, w.as_evaluator());

  const double diff = max_eval_diff(exterior_derivative(w), exterior_derivative(ws), 16,
                                    kDefaultSeed);
  CHECK(diff <= 1e-9);

  const FormField dds = exterior_derivative(exterior_derivative(ws));
  double worst = 0.0;
  RandomStream dirs(kDefaultSeed + 2);
  for (const Vec& x : sample_box(box, 8, kDefaultSeed)) {
    std::vector<Vec> args = {dirs.vector(3, 1.0), dirs.vector(3, 1.0), dirs.vector(3, 1.0)};
    worst = std::max(worst, dds.eval(x, args).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("directional derivative stencil is accurate on smooth data") {
  auto fn = [](const Vec& x) {
    Vec out(1);
    out(0) = std::sin(x(0)) * std::cos(x(1));
    return out;
  };
  Vec x(2), dir(2);
  x << 0.3, 0.2;
  dir << 1.0, 1.0;
  const double expected = std::cos(0.3) * std::cos(0.2) - std::sin(0.3) * std::sin(0.2);
  CHECK(directional_derivative(fn, x, dir, 0)(0) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("wedge bracket of two one-forms expands as [pX,qY] - [pY,qX]") {
  RandomStream rng(kDefaultSeed);
  const LieAlgebra so3 = algebra_preset("so3");
  const Box box = Box::cube(3, 1.0);
  const FormField phi = random_poly_form(box, 1, 3, 2, rng);
  const FormField psi = random_poly_form(box, 1, 3, 2, rng);
  const FormField br = wedge_bracket(phi, psi, so3);

  for (const Vec& x : sample_box(box, 8, kDefaultSeed)) {
    const Vec v = rng.vector(3, 1.0);
    const Vec u = rng.vector(3, 1.0);
    const Vec direct = so3.bracket(phi.eval(x, {v}), psi.eval(x, {u})) -
                       so3.bracket(phi.eval(x, {u}), psi.eval(x, {v}));
    CHECK((br.eval(x, {v, u}) - direct).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("wedge bracket graded symmetry in low degrees") {
  RandomStream rng(kDefaultSeed);
  const LieAlgebra sl2 = algebra_preset("sl2");
  const Box box = Box::cube(3, 1.0);

  const FormField p1 = random_poly_form(box, 1, 3, 2, rng);
  const FormField q1 = random_poly_form(box, 1, 3, 2, rng);
  // degree (1,1): symmetric
  const double d11 = max_eval_diff(wedge_bracket(p1, q1, sl2), wedge_bracket(q1, p1, sl2), 8,
                                   kDefaultSeed);
  CHECK(d11 <= 1e-12);

  const FormField h0 = random_poly_form(box, 0, 3, 2, rng);
  // degree (0,1): antisymmetric
  const FormField lhs = wedge_bracket(h0, p1, sl2);
  const FormField rhs = (-1.0) * wedge_bracket(p1, h0, sl2);
  CHECK(max_eval_diff(lhs, rhs, 8, kDefaultSeed) <= 1e-12);
}

TEST_CASE("half the self bracket of a one-form gives [kv, kw]") {
  RandomStream rng(kDefaultSeed);
  const LieAlgebra e2 = algebra_preset("e2");
  const Box box = Box::cube(2, 1.0);
  const FormField k = random_poly_form(box, 1, 3, 2, rng);
  const FormField kk = wedge_bracket(k, k, e2);

  for (const Vec& x : sample_box(box, 8, kDefaultSeed)) {
    const Vec v = rng.vector(2, 1.0);
    const Vec u = rng.vector(2, 1.0);
    const Vec direct = 2.0 * e2.bracket(k.eval(x, {v}), k.eval(x, {u}));
    CHECK((kk.eval(x, {v, u}) - direct).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("triple self bracket of a one-form vanishes by the graded Jacobi identity") {
  RandomStream rng(kDefaultSeed);
  const LieAlgebra sl2 = algebra_preset("sl2");
  const Box box = Box::cube(3, 1.0);
  const FormField k = random_poly_form(box, 1, 3, 2, rng);
  const FormField triple = wedge_bracket(k, wedge_bracket(k, k, sl2), sl2);
  CHECK(max_abs_coef(triple) <= 1e-12);
}

TEST_CASE("representation wedge matches its alternating sum definition") {
  RandomStream rng(kDefaultSeed);
  const MatrixRep so3 = rep_preset("so3");
  const Box box = Box::cube(3, 1.0);
  const FormField k = random_poly_form(box, 1, 3, 2, rng);
  const FormField psi = random_poly_form(box, 2, 3, 2, rng);
  const FormField rw = rho_wedge(k, so3, psi);

  for (const Vec& x : sample_box(box, 8, kDefaultSeed)) {
    std::vector<Vec> args = {rng.vector(3, 1.0), rng.vector(3, 1.0), rng.vector(3, 1.0)};
    Vec direct = Vec::Zero(3);
    for (int i = 0; i < 3; ++i) {
      std::vector<Vec> rest;
      for (int j = 0; j < 3; ++j)
        if (j != i) rest.push_back(args[j]);
      const double sign = (i % 2 == 0) ? 1.0 : -1.0;
      direct += sign * so3.map(k.eval(x, {args[i]})) * psi.eval(x, rest);
    }
    CHECK((rw.eval(x, args) - direct).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("multilinear application of a bilinear form on two one-forms") {
  RandomStream rng(kDefaultSeed);
  const LieAlgebra so3 = algebra_preset("so3");
  const MultilinearFunction B = killing_form(so3);
  const Box box = Box::cube(3, 1.0);
  const FormField phi = random_poly_form(box, 1, 3, 2, rng);
  const FormField psi = random_poly_form(box, 1, 3, 2, rng);
  const FormField out = apply_multilinear(B, {phi, psi});

  for (const Vec& x : sample_box(box, 8, kDefaultSeed)) {
    const Vec v = rng.vector(3, 1.0);
    const Vec u = rng.vector(3, 1.0);
    const double direct = B.eval({phi.eval(x, {v}), psi.eval(x, {u})}) -
                          B.eval({phi.eval(x, {u}), psi.eval(x, {v})});
    CHECK(out.eval(x, {v, u})(0) == doctest::Approx(direct).epsilon(1e-11));
  }

  // symmetric form on equal slots alternates to zero
  const FormField zero = apply_multilinear(B, {phi, phi});
  CHECK(max_abs_coef(zero) <= 1e-12);
}

TEST_CASE("multilinear application at arity three matches the signed sum over splits") {
  RandomStream rng(kDefaultSeed);
  const MatrixRep sl2 = rep_preset("sl2");
  const MultilinearFunction f = trace_power_form(sl2, 3);
  const Box box = Box::cube(3, 1.0);
  std::vector<FormField> forms;
  for (int j = 0; j < 3; ++j) forms.push_back(random_poly_form(box, 1, 3, 1, rng));
  const FormField out = apply_multilinear(f, forms);

  const int perm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  const double sign[6] = {1, -1, -1, 1, 1, -1};
  for (const Vec& x : sample_box(box, 6, kDefaultSeed)) {
    std::vector<Vec> args = {rng.vector(3, 1.0), rng.vector(3, 1.0), rng.vector(3, 1.0)};
    double direct = 0.0;
    for (int s = 0; s < 6; ++s) {
      std::vector<Vec> vals(3);
      for (int j = 0; j < 3; ++j) vals[j] = forms[j].eval(x, {args[perm[s][j]]});
      direct += sign[s] * f.eval(vals);
    }
    CHECK(out.eval(x, args)(0) == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("pullback along a linear map composes values and jacobian") {
  RandomStream rng(kDefaultSeed);
  const Box src = Box::cube(2, 0.5);
  const Box dst = Box::cube(3, 2.0);
  Mat A(3, 2);
  A << 1.0, 0.5, -0.25, 1.0, 0.5, -1.0;

  ChartMap map;
  map.domain = src;
  map.codim = 3;
  map.eval = [A](const Vec& x) { return Vec(A * x); };
  map.jacobian = [A](const Vec&) { return A; };

  const FormField w = random_poly_form(dst, 1, 2, 2, rng);
  const FormField pw = pullback(map, w);

  for (const Vec& x : sample_box(src, 8, kDefaultSeed)) {
    const Vec v = rng.vector(2, 1.0);
    const Vec direct = w.eval(A * x, {Vec(A * v)});
    CHECK((pw.eval(x, {v}) - direct).cwiseAbs().maxCoeff() <= 1e-13);
  }

  // d commutes with pullback
  const double diff = max_eval_diff(exterior_derivative(pw),
                                    pullback(map, exterior_derivative(w)), 8, kDefaultSeed);
  CHECK(diff <= 1e-9);
}

TEST_CASE("sampled combinations stay multilinear and alternating") {
  RandomStream rng(kDefaultSeed);
  const LieAlgebra so3 = algebra_preset("so3");
  const Box box = Box::cube(3, 1.0);
  const FormField phi = FormField::sampled(box, 1, 3,
                                           random_poly_form(box, 1, 3, 2, rng).as_evaluator());
  const FormField psi = FormField::sampled(box, 1, 3,
                                           random_poly_form(box, 1, 3, 2, rng).as_evaluator());
  const FormField br = wedge_bracket(phi, psi, so3);
  CHECK(multilinearity_residual(br, 8, kDefaultSeed) <= 1e-10);
  CHECK(alternation_residual(br, 8, kDefaultSeed) <= 1e-10);
}

TEST_CASE("forms of degree above the chart dimension collapse to zero") {
  RandomStream rng(kDefaultSeed);
  const LieAlgebra so3 = algebra_preset("so3");
  const Box box = Box::cube(3, 1.0);
  const FormField a = random_poly_form(box, 2, 3, 1, rng);
  const FormField b = random_poly_form(box, 2, 3, 1, rng);
  const FormField w = wedge_bracket(a, b, so3);
  CHECK(w.degree() == 4);
  CHECK(w.backend() == Backend::Poly);
  CHECK(w.coefficients().empty());

  const FormField top = random_poly_form(box, 3, 3, 1, rng);
  CHECK(exterior_derivative(top).coefficients().empty());
}

TEST_CASE("form arithmetic checks degrees and dimensions") {
  const Box box = Box::cube(2, 1.0);
  const FormField a = FormField::poly_zero(box, 1, 2);
  const FormField b = FormField::poly_zero(box, 2, 2);
  CHECK_THROWS_AS(a + b, Error);
  CHECK_THROWS_AS(a.eval(Vec::Zero(2), {}), Error);

  FormField::Coefficients bad;
  bad[{1, 0}] = {Polynomial::constant(2, 1.0)};
  CHECK_THROWS_AS(FormField::poly(box, 2, 1, bad), Error);
}

TEST_CASE("sup norm scans basis tuples") {
  const Box box = Box::cube(3, 1.0);
  FormField::Coefficients coef;
  coef[{0, 1}] = {Polynomial::constant(3, 3.0)};
  coef[{1, 2}] = {Polynomial::constant(3, -0.5)};
  const FormField w = FormField::poly(box, 2, 1, coef);
  CHECK(sup_norm(w, sample_box(box, 4)) == doctest::Approx(3.0));
}

TEST_CASE("postcompose applies a constant linear map to values") {
  RandomStream rng(kDefaultSeed);
  const Box box = Box::cube(2, 1.0);
  const FormField w = random_poly_form(box, 1, 3, 2, rng);
  const Mat M = rng.matrix(2, 3, 1.0);
  const FormField mw = postcompose(M, w);
  CHECK(mw.backend() == Backend::Poly);
  CHECK(mw.target_dim() == 2);
  for (const Vec& x : sample_box(box, 6, kDefaultSeed)) {
    const Vec v = rng.vector(2, 1.0);
    CHECK((mw.eval(x, {v}) - M * w.eval(x, {v})).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("a fixed bracket of coordinate one-forms lands on the third generator") {
  const LieAlgebra so3 = algebra_preset("so3");
  const Box box = Box::cube(3, 1.0);
  FormField::Coefficients ca, cb;
  ca[{0}] = {Polynomial::constant(3, 1.0), Polynomial(3), Polynomial(3)};
  cb[{1}] = {Polynomial(3), Polynomial::constant(3, 1.0), Polynomial(3)};
  const FormField phi = FormField::poly(box, 1, 3, ca);
  const FormField psi = FormField::poly(box, 1, 3, cb);
  const FormField br = wedge_bracket(phi, psi, so3);
  const Vec value = br.eval(Vec::Zero(3), {Vec::Unit(3, 0), Vec::Unit(3, 1)});
  CHECK((value - Vec::Unit(3, 2)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("d is a graded derivation of the wedge bracket") {
  RandomStream rng(kDefaultSeed);
  const LieAlgebra sl2 = algebra_preset("sl2");
  const Box box = Box::cube(3, 1.0);

  const FormField p1 = random_poly_form(box, 1, 3, 2, rng);
  const FormField q1 = random_poly_form(box, 1, 3, 2, rng);
  const FormField lhs1 = exterior_derivative(wedge_bracket(p1, q1, sl2));
  const FormField rhs1 = wedge_bracket(exterior_derivative(p1), q1, sl2) -
                         wedge_bracket(p1, exterior_derivative(q1), sl2);
  CHECK(max_eval_diff(lhs1, rhs1, 8, kDefaultSeed) <= 1e-8);

  const FormField h0 = random_poly_form(box, 0, 3, 2, rng);
  const FormField lhs0 = exterior_derivative(wedge_bracket(h0, q1, sl2));
  const FormField rhs0 = wedge_bracket(exterior_derivative(h0), q1, sl2) +
                         wedge_bracket(h0, exterior_derivative(q1), sl2);
  CHECK(max_eval_diff(lhs0, rhs0, 8, kDefaultSeed) <= 1e-8);
}

TEST_CASE("rho wedge with the adjoint representation is the wedge bracket") {
  RandomStream rng(kDefaultSeed);
  const LieAlgebra so3 = algebra_preset("so3");
  std::vector<Mat> ad_gens;
  for (int i = 0; i < 3; ++i) ad_gens.push_back(so3.ad_basis(i));
  const MatrixRep ad_rep(so3, ad_gens);

  const Box box = Box::cube(3, 1.0);
  const FormField k = random_poly_form(box, 1, 3, 2, rng);
  const FormField psi = random_poly_form(box, 2, 3, 2, rng);
  CHECK(max_eval_diff(rho_wedge(k, ad_rep, psi), wedge_bracket(k, psi, so3), 8, kDefaultSeed) <=
        1e-10);
}

TEST_CASE("rho wedge on a zero-form is plain application") {
  RandomStream rng(kDefaultSeed);
  const MatrixRep so3 = rep_preset("so3");
  const Box box = Box::cube(3, 1.0);
  const FormField k = random_poly_form(box, 1, 3, 2, rng);
  const FormField f0 = random_poly_form(box, 0, 3, 2, rng);
  const FormField out = rho_wedge(k, so3, f0);
  for (const Vec& x : sample_box(box, 6, kDefaultSeed)) {
    const Vec v = rng.vector(3, 1.0);
    const Vec direct = so3.map(k.eval(x, {v})) * f0.eval(x, {});
    CHECK((out.eval(x, {v}) - direct).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("multilinear application on two-forms matches the permutation oracle") {
  RandomStream rng(kDefaultSeed);
  const LieAlgebra so3 = algebra_preset("so3");
  const MultilinearFunction B = killing_form(so3);
  const Box box = Box::cube(4, 1.0);
  const FormField K = random_poly_form(box, 2, 3, 1, rng);
  const FormField out = apply_multilinear(B, {K, K});

  std::vector<int> perm = {0, 1, 2, 3};
  for (const Vec& x : sample_box(box, 4, kDefaultSeed)) {
    std::vector<Vec> args;
    for (int j = 0; j < 4; ++j) args.push_back(rng.vector(4, 1.0));
    double oracle = 0.0;
    std::sort(perm.begin(), perm.end());
    do {
      int inv = 0;
      for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
          if (perm[a] > perm[b]) ++inv;
      const double sign = (inv % 2 == 0) ? 1.0 : -1.0;
      oracle += sign * B.eval({K.eval(x, {args[perm[0]], args[perm[1]]}),
                               K.eval(x, {args[perm[2]], args[perm[3]]})});
    } while (std::next_permutation(perm.begin(), perm.end()));
    oracle /= 4.0; // 1/(2! 2!)
    CHECK(out.eval(x, args)(0) == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("d has a signed Leibniz expansion over multilinear application") {
  RandomStream rng(kDefaultSeed);
  const LieAlgebra so3 = algebra_preset("so3");
  const MultilinearFunction B = killing_form(so3);
  const Box box = Box::cube(3, 1.0);
  const FormField a = random_poly_form(box, 1, 3, 2, rng);
  const FormField b = random_poly_form(box, 1, 3, 2, rng);

  const FormField lhs = exterior_derivative(apply_multilinear(B, {a, b}));
  const FormField rhs = apply_multilinear(B, {exterior_derivative(a), b}) -
                        apply_multilinear(B, {a, exterior_derivative(b)});
  CHECK(max_eval_diff(lhs, rhs, 8, kDefaultSeed) <= 1e-8);
}

TEST_CASE("pullback is functorial under composition") {
  RandomStream rng(kDefaultSeed);
  const Box bx = Box::cube(2, 0.4);
  const Box by = Box::cube(3, 1.0);
  const Box bz = Box::cube(3, 3.0);
  const Mat A = rng.matrix(3, 2, 0.7);
  const Mat C = rng.matrix(3, 3, 0.7);

  ChartMap f{bx, 3, [A](const Vec& x) { return Vec(A * x); }, [A](const Vec&) { return A; }};
  ChartMap g{by, 3, [C](const Vec& y) { return Vec(C * y); }, [C](const Vec&) { return C; }};
  ChartMap gf{bx, 3, [A, C](const Vec& x) { return Vec(C * A * x); },
              [A, C](const Vec&) { return Mat(C * A); }};

  const FormField w = random_poly_form(bz, 2, 2, 2, rng);
  const FormField lhs = pullback(gf, w);
  const FormField rhs = pullback(f, pullback(g, w));
  CHECK(max_eval_diff(lhs, rhs, 8, kDefaultSeed) <= 1e-8);

  ChartMap ident{by, 3, [](const Vec& y) { return y; },
                 [](const Vec&) { return Mat(Mat::Identity(3, 3)); }};
  const FormField w2 = random_poly_form(by, 1, 2, 2, rng);
  CHECK(max_eval_diff(pullback(ident, w2), w2, 8, kDefaultSeed) <= 1e-12);
}
