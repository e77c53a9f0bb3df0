#include <doctest.h>

#include <cmath>
#include <functional>

#include "cartanlab/cartan.hpp"
#include "cartanlab/error.hpp"
#include "cartanlab/presets.hpp"

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

/// Identity plus a small random polynomial part, so the coefficient matrix
/// stays uniformly invertible on the chart.
FormField near_identity_kappa(const Box& box, RandomStream& rng) {
  const int n = box.dim();
  FormField::Coefficients coef;
  for (int i = 0; i < n; ++i) {
    std::vector<Polynomial> v;
    for (int c = 0; c < n; ++c) {
      Polynomial p = random_poly(n, 2, rng);
      p *= 0.25 / n;
      if (c == i) p += Polynomial::constant(n, 1.0);
      v.push_back(p);
    }
    coef[{i}] = v;
  }
  return FormField::poly(box, 1, n, coef);
}

double sup_on_random_args(const FormField& f, const LocalModel& model, int samples,
                          std::uint64_t seed) {
  RandomStream rng(seed);
  double worst = 0.0;
  for (const Vec& u : sample_box(model.chart().shrunk(kBoxMargin), samples, seed)) {
    std::vector<Vec> args;
    for (int k = 0; k < f.degree(); ++k) args.push_back(rng.vector(f.chart_dim(), 1.0));
    worst = std::max(worst, f.eval(u, args).norm());
  }
  return worst;
}

GeneralizedCartanConnection ansatz_on(const std::string& pair_name, std::uint64_t seed) {
  LocalModel model = principal_model(pair_name);
  RandomStream rng(seed);
  const int n = model.h().dim();
  const int m = model.base_dim();
  Mat A0 = rng.matrix(n, m, 0.4);
  Mat A1 = rng.matrix(n, m, 0.2);
  A0.bottomRows(m).setIdentity();
  auto A = [A0, A1](const Vec& x) { return Mat(A0 + x[0] * A1); };
  return make_principal_cartan(model, A);
}

} // namespace

TEST_CASE("maurer-cartan connections are flat") {
  for (const char* name :
       {"so2/so2", "so3/so3", "sl2/sl2", "heisenberg3/heisenberg3"}) {
    CAPTURE(name);
    const CartanConnection conn = maurer_cartan(name);
    const FormField K = curvature(conn);
    const auto points = sample_box(conn.model().chart().shrunk(kBoxMargin), 24);
    CHECK(sup_norm(K, points) <= 1e-8);
    CHECK(conn.recorded_min_singular() > 0.1);
  }
}

TEST_CASE("the principal ansatz reproduces generators and is equivariant") {
  for (const char* name : {"sl2/borel", "e2/so2"}) {
    CAPTURE(name);
    const GeneralizedCartanConnection conn = ansatz_on(name, 21);
    CHECK(conn.reproduction_residual(24) <= 1e-8);
    CHECK(conn.equivariance_residual(24) <= 1e-7);
  }
}

TEST_CASE("without a horizontal part the ansatz is the fiber parallelism") {
  LocalModel model = principal_model("sl2/sl2");
  const GeneralizedCartanConnection conn =
      make_principal_cartan(model, [](const Vec&) { return Mat::Zero(3, 0); });
  const CartanConnection mc = maurer_cartan("sl2/sl2");
  RandomStream rng(kDefaultSeed);
  for (const Vec& u : sample_box(model.chart().shrunk(kBoxMargin), 8)) {
    const Vec v = rng.vector(3, 1.0);
    CHECK((conn.kappa().eval(u, {v}) - mc.kappa().eval(u, {v})).norm() <= 1e-12);
  }
}

TEST_CASE("nondegeneracy of the ansatz tracks the horizontal coefficient") {
  LocalModel model = principal_model("sl2/borel");

  Mat good = Mat::Zero(3, 1);
  good(2, 0) = 1.0;
  const GeneralizedCartanConnection regular =
      make_principal_cartan(model, [good](const Vec&) { return good; });
  CHECK(regular.min_singular_value(16) > 0.05);
  CHECK_NOTHROW(CartanConnection(model, regular.kappa(), 16));

  const GeneralizedCartanConnection degenerate =
      make_principal_cartan(model, [](const Vec&) { return Mat::Zero(3, 1); });
  CHECK(degenerate.min_singular_value(16) <= 1e-14);
  CHECK_THROWS_AS(CartanConnection(model, degenerate.kappa(), 16), Error);
}

TEST_CASE("zeta inverts the connection form") {
  const CartanConnection conn = maurer_cartan("sl2/borel");
  RandomStream rng(kDefaultSeed);
  for (const Vec& u : sample_box(conn.model().chart().shrunk(kBoxMargin), 8)) {
    const Vec X = rng.vector(3, 1.0);
    const Vec Y = rng.vector(3, 1.0);
    CHECK((conn.kappa().eval(u, {conn.zeta_at(u, X)}) - X).norm() <= 1e-10);
    const Vec lin =
        conn.zeta_at(u, Vec(2.0 * X - 0.5 * Y)) - 2.0 * conn.zeta_at(u, X) + 0.5 * conn.zeta_at(u, Y);
    CHECK(lin.norm() <= 1e-12);
  }
  const Vec X = rng.vector(3, 1.0);
  CHECK((conn.zeta_at(Vec::Zero(3), X) - X).norm() <= 1e-13);
}

TEST_CASE("singular coframes are reported where they occur") {
  const SubalgebraEmbedding pair = pair_preset("abelian3/abelian3");
  const Box box = Box::cube(3, 1.0);
  LocalModel model = LocalModel::bare(pair, box);

  FormField::Coefficients coef;
  for (int i = 0; i < 3; ++i) {
    std::vector<Polynomial> v(3, Polynomial(3));
    if (i < 2)
      v[i] = Polynomial::constant(3, 1.0);
    else
      v[i] = Polynomial::variable(3, 0);
    coef[{i}] = v;
  }
  const FormField kappa = FormField::poly(box, 1, 3, coef);
  const GeneralizedCartanConnection conn(model, kappa);

  Vec center = Vec::Zero(3);
  CHECK_THROWS_AS(conn.zeta_at(center, Vec::Unit(3, 0)), Error);
  try {
    conn.zeta_at(center, Vec::Unit(3, 0));
  } catch (const Error& e) {
    CHECK(e.code() == Err::SingularCoframe);
  }
  Vec off = center;
  off[0] = 0.5;
  CHECK_NOTHROW(conn.zeta_at(off, Vec::Unit(3, 0)));

  FormField::Coefficients flat_coef;
  for (int i = 0; i < 3; ++i) {
    std::vector<Polynomial> v(3, Polynomial(3));
    if (i < 2) v[i] = Polynomial::constant(3, 1.0);
    flat_coef[{i}] = v;
  }
  CHECK_THROWS_AS(
      CartanConnection(model, FormField::poly(box, 1, 3, flat_coef), 16), Error);
}

TEST_CASE("polynomial connection forms satisfy the bianchi identity") {
  RandomStream rng(7);
  for (const char* name : {"sl2/borel", "e2/so2"}) {
    CAPTURE(name);
    LocalModel model = bare_model(name);
    const FormField kappa = near_identity_kappa(model.chart(), rng);
    const GeneralizedCartanConnection conn(model, kappa);
    const FormField K = curvature(conn);
    const double scale = 1.0 + sup_on_random_args(K, model, 16, 11);
    CHECK(bianchi_residual(conn, 24) <= 1e-7 * scale);
  }
}

TEST_CASE("the sampled ansatz keeps the bianchi defect at stencil noise") {
  const GeneralizedCartanConnection conn = ansatz_on("e2/so2", 33);
  CHECK(bianchi_residual(conn, 6) <= 1e-6);
}

TEST_CASE("curvature of the ansatz is horizontal and equivariant") {
  const GeneralizedCartanConnection conn = ansatz_on("e2/so2", 5);
  const FormField K = curvature(conn);
  const double scale = 1.0 + sup_on_random_args(K, conn.model(), 16, 13);
  CHECK(horizontality_residual(conn, K, 16) <= 1e-6 * scale);
  const MatrixRep twist = adjoint_rep_on_h(conn.model().pair());
  CHECK(equivariance_residual(conn.model(), twist, K, 16) <= 1e-6 * scale);
}

TEST_CASE("the covariant derivative of curvature restates bianchi") {
  const GeneralizedCartanConnection conn = ansatz_on("e2/so2", 5);
  const FormField K = curvature(conn);
  const LieAlgebra& h = conn.model().h();
  std::vector<Mat> gens;
  for (int i = 0; i < h.dim(); ++i) gens.push_back(h.ad(Vec::Unit(h.dim(), i)));
  const MatrixRep ad_rep(h, gens);

  const FormField dK = covariant_derivative(conn, ad_rep, K);
  CHECK(sup_on_random_args(dK, conn.model(), 6, 17) <= 1e-6);

  CHECK_THROWS_AS(covariant_derivative(conn, ad_rep, conn.kappa()), Error);
  try {
    covariant_derivative(conn, ad_rep, conn.kappa());
  } catch (const Error& e) {
    CHECK(e.code() == Err::NotHorizontal);
  }
}

TEST_CASE("the curvature function vanishes for flat connections") {
  const CartanConnection conn = maurer_cartan("so3/so2");
  const CurvatureFunction cf = curvature_function(conn);
  Vec u(3);
  u << 0.3, -0.2, 0.4;
  for (const Mat& comp : cf.at(u)) CHECK(comp.cwiseAbs().maxCoeff() <= 1e-9);
  CHECK(cf.constancy_residual(8) <= 1e-8);
  CHECK(cf.antisymmetry_residual(8) <= 1e-9);
}

TEST_CASE("conformal rescaling moves the curvature function monotonically") {
  const CartanConnection mc = maurer_cartan("so3/so2");
  const FormField base = mc.kappa();
  auto perturbed = [&](double eps) {
    auto eval = [base, eps](const Vec& u, const std::vector<Vec>& args) {
      return Vec((1.0 + eps * u[0]) * base.eval(u, args));
    };
    FormField kappa = FormField::sampled(base.domain(), 1, base.target_dim(), eval);
    return CartanConnection(mc.model(), kappa, 16);
  };
  double previous = 0.0;
  for (double eps : {1e-3, 1e-2, 1e-1}) {
    const double wobble = curvature_function(perturbed(eps)).constancy_residual(6);
    CHECK(wobble > previous);
    previous = wobble;
  }
  CHECK(previous > 1e-4);
}

TEST_CASE("reductive pairs split the connection into form and potential") {
  RandomStream rng(19);
  LocalModel model = bare_model("e2/so2");
  const FormField kappa = near_identity_kappa(model.chart(), rng);
  const GeneralizedCartanConnection conn(model, kappa);

  Mat V = Mat::Zero(3, 2);
  V(0, 0) = 1.0;
  V(1, 1) = 1.0;
  const auto [theta, omega] = reductive_split(conn, V);
  CHECK(theta.backend() == Backend::Poly);
  CHECK(theta.target_dim() == 2);
  CHECK(omega.target_dim() == 1);

  const Mat iota = model.pair().inclusion;
  RandomStream args(23);
  for (const Vec& u : sample_box(model.chart().shrunk(kBoxMargin), 8)) {
    const Vec v = args.vector(3, 1.0);
    const Vec rebuilt = V * theta.eval(u, {v}) + iota * omega.eval(u, {v});
    CHECK((rebuilt - kappa.eval(u, {v})).norm() <= 1e-12);
    const Vec X = args.vector(1, 1.0);
    const Vec vert = conn.zeta_at(u, model.pair().include(X));
    CHECK((omega.eval(u, {vert}) - X).norm() <= 1e-8);
    CHECK(theta.eval(u, {vert}).norm() <= 1e-8);
  }
}

TEST_CASE("non invariant complements are rejected") {
  RandomStream rng(29);
  LocalModel model = bare_model("sl2/borel");
  const GeneralizedCartanConnection conn(model, near_identity_kappa(model.chart(), rng));

  Mat V = Mat::Zero(3, 1);
  V(2, 0) = 1.0;
  CHECK_THROWS_AS(reductive_split(conn, V), Error);
  try {
    reductive_split(conn, V);
  } catch (const Error& e) {
    CHECK(e.code() == Err::NotReductive);
  }

  Mat overlap = Mat::Zero(3, 1);
  overlap(0, 0) = 1.0;
  CHECK_THROWS_AS(reductive_split(conn, overlap), Error);
}

TEST_CASE("fundamental fields close the bracket axiom") {
  const CartanConnection conn = maurer_cartan("sl2/borel");
  const double scale = 1.0 + sup_on_random_args(conn.kappa(), conn.model(), 16, 3);
  CHECK(bracket_axiom_residual(conn, 12) <= 1e-5 * scale);
}

TEST_CASE("curvature measures the failure of zeta to be a homomorphism") {
  const CartanConnection flat = maurer_cartan("sl2/sl2");
  CHECK(bracket_defect_residual(flat, 10) <= 1e-5);

  const CartanConnection mc = maurer_cartan("so3/so3");
  auto eval = [base = mc.kappa()](const Vec& u, const std::vector<Vec>& args) {
    return Vec((1.0 + 0.1 * u[0]) * base.eval(u, args));
  };
  const CartanConnection bent(
      mc.model(), FormField::sampled(mc.kappa().domain(), 1, 3, eval), 16);
  const double scale = 1.0 + sup_on_random_args(bent.kappa(), bent.model(), 16, 3);
  CHECK(bracket_defect_residual(bent, 10) <= 1e-4 * scale);
}

TEST_CASE("the lie derivative along fundamental fields twists by the adjoint") {
  const GeneralizedCartanConnection ansatz = ansatz_on("e2/so2", 5);
  const double s1 = 1.0 + sup_on_random_args(ansatz.kappa(), ansatz.model(), 16, 3);
  CHECK(ansatz.infinitesimal_equivariance_residual(10) <= 1e-5 * s1);

  const CartanConnection mc = maurer_cartan("sl2/borel");
  const double s2 = 1.0 + sup_on_random_args(mc.kappa(), mc.model(), 16, 3);
  CHECK(mc.infinitesimal_equivariance_residual(10) <= 1e-5 * s2);
}
