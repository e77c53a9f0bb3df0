#include <doctest.h>

#include <cmath>
#include <functional>

#include <unsupported/Eigen/MatrixFunctions>

#include "cartanlab/error.hpp"
#include "cartanlab/jets.hpp"
#include "cartanlab/presets.hpp"

using namespace cartanlab;

namespace {

Polynomial monomial(int nvars, const std::vector<int>& e, double c) {
  Polynomial p(nvars);
  p.add_term(e, c);
  return p;
}

JetVectorField random_field(int nvars, int order, RandomStream& rng, bool vanishing) {
  PolynomialMap comp;
  for (int i = 0; i < nvars; ++i) {
    Polynomial p(nvars);
    std::vector<int> e(nvars, 0);
    std::function<void(int, int)> rec = [&](int v, int left) {
      if (v == nvars) {
        const int deg = order - left;
        if (deg <= order && !(vanishing && deg == 0)) p.add_term(e, rng.uniform(-0.5, 0.5));
        return;
      }
      for (int k = 0; k <= left; ++k) {
        e[v] = k;
        rec(v + 1, left - k);
      }
      e[v] = 0;
    };
    rec(0, order);
    comp.comp.push_back(std::move(p));
  }
  return JetVectorField(std::move(comp), order);
}

JetElement random_jet(int nvars, int order, RandomStream& rng) {
  JetVectorField f = random_field(nvars, order, rng, true);
  PolynomialMap map = f.components();
  for (int i = 0; i < nvars; ++i) map.comp[i] += Polynomial::variable(nvars, i);
  return JetElement(std::move(map), order);
}

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

Err thrown_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Err::InvalidArgument;
}

} // namespace

TEST_CASE("jet elements fix the origin and respect the caps") {
  const JetElement id = JetElement::identity(2, 2);
  CHECK(id.component(0).degree() == 1);
  CHECK((id.linear_block() - Mat::Identity(2, 2)).norm() == 0.0);

  PolynomialMap shifted;
  shifted.comp = {Polynomial::constant(2, 1.0) + Polynomial::variable(2, 0),
                  Polynomial::variable(2, 1)};
  CHECK(thrown_code([&] { JetElement(shifted, 2); }) == Err::InvalidArgument);

  PolynomialMap big;
  for (int i = 0; i < 4; ++i) big.comp.push_back(Polynomial::variable(4, i));
  CHECK(thrown_code([&] { JetElement(big, 2); }) == Err::DimensionOverflow);
  CHECK(thrown_code([] { JetElement::identity(2, 4); }) == Err::DimensionOverflow);
  CHECK(thrown_code([] { JetVectorField::zero(2, 0); }) == Err::DimensionOverflow);

  // Construction truncates to the stated order.
  PolynomialMap cubic;
  cubic.comp = {Polynomial::variable(1, 0) + monomial(1, {3}, 2.0)};
  CHECK(JetElement(cubic, 2).component(0).degree() == 1);

  const JetVectorField f = JetVectorField::constant((Vec(2) << 1.0, -2.0).finished(), 2);
  CHECK(!f.vanishes_at_origin());
  CHECK((f.constant_term() - (Vec(2) << 1.0, -2.0).finished()).norm() == 0.0);
  CHECK(JetVectorField::linear(Mat::Identity(2, 2), 2).vanishes_at_origin());
}

TEST_CASE("composition and inversion work degree by degree") {
  RandomStream rng(5);
  const JetElement a = random_jet(2, 3, rng);
  const JetElement id = JetElement::identity(2, 3);
  CHECK(jet_compose(id, a).distance(a) <= 1e-15);
  CHECK(jet_compose(a, id).distance(a) <= 1e-15);

  Mat m1 = rng.matrix(2, 2, 1.0);
  Mat m2 = rng.matrix(2, 2, 1.0);
  CHECK(jet_compose(JetElement::linear(m1, 2), JetElement::linear(m2, 2))
            .distance(JetElement::linear(Mat(m1 * m2), 2)) <= 1e-14);

  PolynomialMap pa, pb;
  pa.comp = {Polynomial::variable(1, 0) + monomial(1, {2}, 0.7)};
  pb.comp = {Polynomial::variable(1, 0) + monomial(1, {2}, -0.2)};
  const JetElement ab = jet_compose(JetElement(pa, 2), JetElement(pb, 2));
  CHECK(ab.component(0).coefficient({1}) == doctest::Approx(1.0));
  CHECK(ab.component(0).coefficient({2}) == doctest::Approx(0.5));

  const JetElement inv = jet_invert(JetElement(pa, 2));
  CHECK(inv.component(0).coefficient({2}) == doctest::Approx(-0.7));

  for (int seed = 0; seed < 4; ++seed) {
    RandomStream r2(40 + seed);
    const JetElement b = random_jet(3, 3, r2);
    CHECK(jet_compose(b, jet_invert(b)).distance(JetElement::identity(3, 3)) <= 1e-12);
    CHECK(jet_compose(jet_invert(b), b).distance(JetElement::identity(3, 3)) <= 1e-12);
  }

  CHECK(thrown_code([] {
          jet_invert(JetElement(PolynomialMap{{monomial(1, {2}, 1.0)}}, 2));
        }) == Err::SingularLinearPart);
}

TEST_CASE("the bracket extends the matrix commutator") {
  RandomStream rng(6);
  const JetVectorField c1 = JetVectorField::constant(rng.vector(2, 1.0), 2);
  const JetVectorField c2 = JetVectorField::constant(rng.vector(2, 1.0), 2);
  CHECK(jet_bracket(c1, c2).distance(JetVectorField::zero(2, 2)) == 0.0);

  const Mat a = rng.matrix(2, 2, 1.0);
  const Mat b = rng.matrix(2, 2, 1.0);
  CHECK(jet_bracket(JetVectorField::linear(a, 2), JetVectorField::linear(b, 2))
            .distance(JetVectorField::linear(Mat(a * b - b * a), 2)) <= 1e-14);

  // With one variable, [x d/dx, x^2 d/dx] carries the flow-bracket sign.
  const JetVectorField lin(PolynomialMap{{Polynomial::variable(1, 0)}}, 2);
  const JetVectorField quad(PolynomialMap{{monomial(1, {2}, 1.0)}}, 2);
  CHECK(jet_bracket(lin, quad).distance(
            JetVectorField(PolynomialMap{{monomial(1, {2}, -1.0)}}, 2)) == 0.0);

  for (int seed = 0; seed < 4; ++seed) {
    RandomStream r2(60 + seed);
    const JetVectorField x = random_field(2, 3, r2, true);
    const JetVectorField y = random_field(2, 3, r2, true);
    const JetVectorField z = random_field(2, 3, r2, true);
    const JetVectorField jacobi = jet_bracket(x, jet_bracket(y, z)) +
                                  jet_bracket(y, jet_bracket(z, x)) +
                                  jet_bracket(z, jet_bracket(x, y));
    CHECK(jacobi.distance(JetVectorField::zero(2, 3)) <= 1e-12);
  }
}

TEST_CASE("flow jets exponentiate the field") {
  CHECK(jet_exp(JetVectorField::zero(2, 2)).distance(JetElement::identity(2, 2)) <= 1e-15);

  RandomStream rng(8);
  const Mat a = rng.matrix(2, 2, 0.6);
  CHECK(jet_exp(JetVectorField::linear(a, 2))
            .distance(JetElement::linear(Mat(a.exp()), 2)) <= 1e-12);

  // d/dt x = x^2 flows to x / (1 - t x); at t = 1 the 3-jet is x + x^2 + x^3.
  const JetVectorField quad(PolynomialMap{{monomial(1, {2}, 1.0)}}, 3);
  const JetElement flow = jet_exp(quad);
  CHECK(flow.component(0).coefficient({1}) == doctest::Approx(1.0));
  CHECK(flow.component(0).coefficient({2}) == doctest::Approx(1.0));
  CHECK(flow.component(0).coefficient({3}) == doctest::Approx(1.0));

  CHECK(thrown_code([] {
          jet_exp(JetVectorField::constant(Vec::Ones(2), 2));
        }) == Err::InvalidArgument);

  for (int seed = 0; seed < 6; ++seed) {
    RandomStream r2(80 + seed);
    const JetVectorField x = random_field(2, 3, r2, true);

    // One-parameter group law, exact on jets.
    const JetElement whole = jet_exp(x);
    JetElement stepped = jet_exp(x * 0.125);
    for (int d = 0; d < 3; ++d) stepped = jet_compose(stepped, stepped);
    CHECK(stepped.distance(whole) <= 1e-12);

    // Against an integrator near the origin the defect is Taylor remainder.
    const Vec p = r2.vector(2, 0.05);
    CHECK((rk4_flow(x, p, 64) - whole.eval(p)).norm() <= 1e-4);
  }
}

TEST_CASE("pullback along jets is contravariant and differentiates to the bracket") {
  RandomStream rng(9);
  const JetElement id = JetElement::identity(2, 2);
  const JetVectorField y = random_field(2, 2, rng, false);
  CHECK(jet_adjoint(id, y).distance(y) <= 1e-14);

  Mat a = rng.matrix(2, 2, 0.5) + Mat::Identity(2, 2);
  const JetVectorField linb = JetVectorField::linear(rng.matrix(2, 2, 1.0), 2);
  const Mat conj = a.inverse() * linb.linear_block() * a;
  CHECK(jet_adjoint(JetElement::linear(a, 2), linb)
            .distance(JetVectorField::linear(conj, 2)) <= 1e-12);

  for (int seed = 0; seed < 4; ++seed) {
    RandomStream r2(90 + seed);
    const JetElement lin = JetElement::linear(
        Mat(r2.matrix(2, 2, 0.4) + Mat::Identity(2, 2)), 2);
    const JetElement gen = random_jet(2, 2, r2);
    const JetVectorField w = random_field(2, 2, r2, false);
    CHECK(jet_adjoint(jet_compose(lin, gen), w)
              .distance(jet_adjoint(gen, jet_adjoint(lin, w))) <= 1e-12);

    const JetElement gen2 = random_jet(2, 2, r2);
    const JetVectorField v = random_field(2, 2, r2, true);
    CHECK(jet_adjoint(jet_compose(gen2, gen), v)
              .distance(jet_adjoint(gen, jet_adjoint(gen2, v))) <= 1e-12);

    // Pullback respects brackets of vanishing fields.
    const JetVectorField v2 = random_field(2, 2, r2, true);
    CHECK(jet_adjoint(gen, jet_bracket(v, v2))
              .distance(jet_bracket(jet_adjoint(gen, v), jet_adjoint(gen, v2))) <= 1e-12);
  }

  for (int seed = 0; seed < 4; ++seed) {
    RandomStream r2(110 + seed);
    const JetVectorField x = random_field(2, 3, r2, true);
    const JetVectorField w = random_field(2, 3, r2, false);
    const double h = 1e-5;
    const JetVectorField plus = jet_adjoint(jet_exp(x * h), w);
    const JetVectorField minus = jet_adjoint(jet_exp(x * -h), w);
    const JetVectorField derivative = (plus - minus) * (0.5 / h);
    CHECK(derivative.distance(jet_bracket(x, w) * -1.0) <= 1e-7);
  }
}

TEST_CASE("the truncated symbol algebra of rotations is the euclidean algebra") {
  const LieAlgebra a1 = g_infinity_truncated(
      LinearLieAlgebra::from_rep(rep_preset("so2")), 1);
  CHECK(a1.dim() == 3);
  CHECK(a1.name() == "a1_so2");
  const LieAlgebra e2 = algebra_preset("e2");
  for (int i = 0; i < 3; ++i) CHECK((a1.ad_basis(i) - e2.ad_basis(i)).norm() <= 1e-12);
}

TEST_CASE("the conformal symbol algebra closes at order two and is graded") {
  const LieAlgebra a2 = g_infinity_truncated(
      LinearLieAlgebra::from_rep(rep_preset("co3")), 2);
  CHECK(a2.dim() == 10);
  CHECK(a2.name() == "a2_co3");

  auto block_norm = [&](int i, int j, int lo, int len) {
    Vec c = a2.ad_basis(i).col(j);
    c.segment(lo, len).setZero();
    return c.norm();
  };
  for (int i = 3; i < 7; ++i)
    for (int j = 0; j < 3; ++j) CHECK(block_norm(i, j, 0, 3) <= 1e-12);
  for (int i = 7; i < 10; ++i)
    for (int j = 0; j < 3; ++j) CHECK(block_norm(i, j, 3, 4) <= 1e-12);
  for (int i = 7; i < 10; ++i)
    for (int j = 3; j < 7; ++j) CHECK(block_norm(i, j, 7, 3) <= 1e-12);
  for (int i = 7; i < 10; ++i)
    for (int j = 7; j < 10; ++j) CHECK(a2.ad_basis(i).col(j).norm() <= 1e-12);

  const LieAlgebra flat2 = g_infinity_truncated(LinearLieAlgebra(2, {}), 1);
  CHECK(flat2.dim() == 2);
  CHECK(flat2.ad_basis(0).norm() == 0.0);

  CHECK(thrown_code([] {
          g_infinity_truncated(LinearLieAlgebra::from_rep(rep_preset("gl2")), 2);
        }) == Err::TruncationNotClosed);
  CHECK(thrown_code([] {
          g_infinity_truncated(LinearLieAlgebra::from_rep(rep_preset("co3")), 1);
        }) == Err::TruncationNotClosed);
  CHECK(thrown_code([] {
          g_infinity_truncated(LinearLieAlgebra(2, {}), 4);
        }) == Err::DimensionOverflow);
}

TEST_CASE("flat model connections agree with the canonical constructions") {
  const LinearLieAlgebra so2 = LinearLieAlgebra::from_rep(rep_preset("so2"));
  const CartanConnection jets_conn = flat_model_connection(so2, 1);
  const CartanConnection type1 = type1_connection(LocalGStructure::flat(so2));
  CHECK(jets_conn.model().chart().dim() == 3);

  RandomStream rng(12);
  for (const Vec& u : sample_box(Box::cube(3, 0.25), 6)) {
    const Vec arg = rng.vector(3, 1.0);
    CHECK((jets_conn.kappa().eval(u, {arg}) - type1.kappa().eval(u, {arg})).norm() <= 1e-10);
  }
  CHECK(jets_conn.reproduction_residual(12) <= 1e-8);
  CHECK(jets_conn.equivariance_residual(12) <= 1e-7);

  const LinearLieAlgebra co3 = LinearLieAlgebra::from_rep(rep_preset("co3"));
  const CartanConnection tower = flat_model_connection(co3, 2);
  const CartanConnection type2 = type2_connection(LocalGStructure::flat(co3));
  CHECK(tower.model().chart().dim() == 10);
  RandomStream rng2(13);
  for (const Vec& u : sample_box(Box::cube(10, 0.15), 4)) {
    const Vec arg = rng2.vector(10, 1.0);
    CHECK((tower.kappa().eval(u, {arg}) - type2.kappa().eval(u, {arg})).norm() <= 1e-10);
  }

  const CartanConnection trivial = flat_model_connection(LinearLieAlgebra(2, {}), 1);
  CHECK(trivial.model().chart().dim() == 2);
  CHECK((trivial.kappa_matrix(Vec::Zero(2)) - Mat::Identity(2, 2)).norm() <= 1e-14);
}
