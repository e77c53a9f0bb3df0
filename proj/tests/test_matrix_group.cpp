#include <doctest.h>

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "cartanlab/error.hpp"
#include "cartanlab/matrix_group.hpp"
#include "cartanlab/presets.hpp"
#include "cartanlab/sampling.hpp"

using namespace cartanlab;

TEST_CASE("exp of a rotation generator gives the rotation matrix") {
  const MatrixRep so2 = rep_preset("so2");
  Vec x(1);
  x << 0.3;
  const Mat g = group_exp(so2, x);
  Mat expected(2, 2);
  expected << std::cos(0.3), -std::sin(0.3), std::sin(0.3), std::cos(0.3);
  CHECK((g - expected).norm() <= 1e-12);
}

TEST_CASE("log inverts exp near the identity on every preset group") {
  RandomStream rng(kDefaultSeed);
  for (const std::string& name : {"so3", "sl2", "e2", "heisenberg3", "gl2", "aff1", "borel_sl2"}) {
    const MatrixRep rep = rep_preset(name);
    for (int trial = 0; trial < 25; ++trial) {
      const Vec x = rng.vector(rep.algebra().dim(), 0.2);
      const Vec back = group_log(rep, group_exp(rep, x));
      CHECK((back - x).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
}

TEST_CASE("far from the identity the principal branch is refused") {
  const MatrixRep so2 = rep_preset("so2");
  Mat half_turn(2, 2);
  half_turn << -1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_WITH_AS(group_log(so2, half_turn), doctest::Contains("principal"), Error);
}

TEST_CASE("logs outside the generator span are rejected") {
  const MatrixRep so2 = rep_preset("so2");
  Mat stretch(2, 2);
  stretch << 1.2, 0.0, 0.0, 1.0 / 1.2;
  CHECK_THROWS_AS(group_log(so2, stretch), Error);
  try {
    group_log(so2, stretch);
  } catch (const Error& e) {
    CHECK(e.code() == Err::NotInAlgebra);
  }
}

TEST_CASE("adjoint action matches the exponential of ad") {
  RandomStream rng(kDefaultSeed);
  for (const std::string& name : {"so3", "sl2", "e2"}) {
    const MatrixRep rep = rep_preset(name);
    const int d = rep.algebra().dim();
    for (int trial = 0; trial < 10; ++trial) {
      const Vec x = rng.vector(d, 0.4);
      const Mat lhs = adjoint_action(rep, group_exp(rep, x));
      const Mat rhs = rep.algebra().ad(x).exp();
      CHECK((lhs - rhs).norm() <= 1e-10);
    }
  }
}

TEST_CASE("adjoint action is a homomorphism") {
  RandomStream rng(kDefaultSeed);
  const MatrixRep sl2 = rep_preset("sl2");
  for (int trial = 0; trial < 10; ++trial) {
    const Mat g = group_exp(sl2, rng.vector(3, 0.3));
    const Mat h = group_exp(sl2, rng.vector(3, 0.3));
    CHECK((adjoint_action(sl2, g * h) - adjoint_action(sl2, g) * adjoint_action(sl2, h)).norm() <=
          1e-10);
  }
}

TEST_CASE("conjugation outside the normalizer is flagged") {
  const MatrixRep borel = rep_preset("borel_sl2");
  Mat lower(2, 2);
  lower << 0.0, 0.0, 1.0, 0.0; // strictly lower generator, not in the borel span
  const Mat g = lower.exp();
  CHECK_THROWS_AS(adjoint_action(borel, g), Error);
  try {
    adjoint_action(borel, g);
  } catch (const Error& e) {
    CHECK(e.code() == Err::SubgroupViolation);
  }
}

TEST_CASE("phi1 sums the series (I - exp(-M)) M^{-1}") {
  RandomStream rng(kDefaultSeed);
  CHECK((phi1(Mat::Zero(3, 3)) - Mat::Identity(3, 3)).norm() <= 1e-15);
  for (int trial = 0; trial < 5; ++trial) {
    const Mat M = rng.matrix(3, 3, 0.5);
    const Mat closed = (Mat::Identity(3, 3) - Mat((-M).exp())) * M.inverse();
    CHECK((phi1(M) - closed).norm() <= 1e-12);
  }
}

TEST_CASE("left log derivative of a one-parameter subgroup is its generator") {
  const MatrixRep so3 = rep_preset("so3");
  Vec X(3);
  X << 0.4, -0.2, 0.7;
  PolynomialMap P;
  for (int i = 0; i < 3; ++i) {
    Polynomial p = Polynomial::variable(1, 0);
    p *= X(i);
    P.comp.push_back(p);
  }
  const auto a = GroupValuedMap::exp_of_polynomial(so3, Box::cube(1, 1.0), P);
  const FormField delta = left_log_derivative(so3, a);

  Vec t(1), one(1);
  one << 1.0;
  for (double s : {-0.5, 0.0, 0.25, 0.8}) {
    t << s;
    CHECK((delta.eval(t, {one}) - X).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("left log derivative of exp of a curve matches the phi1 formula") {
  const MatrixRep sl2 = rep_preset("sl2");
  RandomStream rng(kDefaultSeed);
  const Vec X = rng.vector(3, 0.5);
  const Vec Y = rng.vector(3, 0.5);
  PolynomialMap P;
  for (int i = 0; i < 3; ++i) {
    Polynomial p(1);
    p.add_term({1}, X(i));
    p.add_term({2}, Y(i));
    P.comp.push_back(p);
  }
  const auto a = GroupValuedMap::exp_of_polynomial(sl2, Box::cube(1, 1.0), P);
  const FormField delta = left_log_derivative(sl2, a);

  const LieAlgebra& L = sl2.algebra();
  Vec t(1), one(1);
  one << 1.0;
  for (double s : {-0.6, -0.1, 0.3, 0.7}) {
    t << s;
    Vec pos(1);
    pos << s;
    const Vec value = P.eval(pos);
    const Vec speed = P.jacobian(pos).col(0);
    const Vec expected = phi1(L.ad(value)) * speed;
    CHECK((delta.eval(t, {one}) - expected).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("right log derivative is the adjoint of the left one") {
  const MatrixRep so3 = rep_preset("so3");
  RandomStream rng(kDefaultSeed);
  const Vec X = rng.vector(3, 0.6);
  const Vec Y = rng.vector(3, 0.6);
  const Box box = Box::cube(2, 1.0);
  const auto a = GroupValuedMap::sampled(box, 3, [&](const Vec& x) {
    return Mat(group_exp(so3, x(0) * X) * group_exp(so3, x(1) * Y));
  });
  const FormField dl = left_log_derivative(so3, a);
  const FormField dr = right_log_derivative(so3, a);

  for (const Vec& x : sample_box(box, 8, kDefaultSeed)) {
    const Mat Adg = adjoint_action(so3, a.eval(x));
    const Vec v = rng.vector(2, 1.0);
    CHECK((dr.eval(x, {v}) - Adg * dl.eval(x, {v})).cwiseAbs().maxCoeff() <= 1e-8);
  }
}

TEST_CASE("log derivatives satisfy their structure equations") {
  const MatrixRep sl2 = rep_preset("sl2");
  const LieAlgebra& L = sl2.algebra();
  RandomStream rng(kDefaultSeed);
  const Vec X = rng.vector(3, 0.5);
  const Vec Y = rng.vector(3, 0.5);
  const Box box = Box::cube(2, 0.8);
  const auto a = GroupValuedMap::sampled(box, 2, [&](const Vec& x) {
    return Mat(group_exp(sl2, x(0) * X) * group_exp(sl2, x(1) * Y));
  });

  const FormField dl = left_log_derivative(sl2, a);
  const FormField left_eq = exterior_derivative(dl) + 0.5 * wedge_bracket(dl, dl, L);

  const FormField dr = right_log_derivative(sl2, a);
  const FormField right_eq = exterior_derivative(dr) - 0.5 * wedge_bracket(dr, dr, L);

  RandomStream dirs(kDefaultSeed + 7);
  double worst_l = 0.0, worst_r = 0.0;
  for (const Vec& x : sample_box(box, 8, kDefaultSeed)) {
    std::vector<Vec> args = {dirs.vector(2, 1.0), dirs.vector(2, 1.0)};
    worst_l = std::max(worst_l, left_eq.eval(x, args).cwiseAbs().maxCoeff());
    worst_r = std::max(worst_r, right_eq.eval(x, args).cwiseAbs().maxCoeff());
  }
  CHECK(worst_l <= 1e-6);
  CHECK(worst_r <= 1e-6);
}

TEST_CASE("thousand-sample round trips hold on every preset") {
  for (const std::string& name : algebra_preset_names()) {
    const MatrixRep rep = rep_preset(name);
    RandomStream rng(kDefaultSeed);
    const int d = rep.algebra().dim();
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const Vec x = rng.vector(d, 0.2);
      const Mat g = group_exp(rep, x);
      worst = std::max(worst, (g * group_exp(rep, Vec(-x)) -
                               Mat::Identity(rep.mat_dim(), rep.mat_dim()))
                                  .norm());
      worst = std::max(worst, (group_log(rep, g) - x).cwiseAbs().maxCoeff());
    }
    INFO(name);
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("adjoint action preserves the bracket") {
  RandomStream rng(kDefaultSeed);
  for (const std::string& name : {"so3", "sl2", "e2"}) {
    const MatrixRep rep = rep_preset(name);
    const LieAlgebra& L = rep.algebra();
    const int d = L.dim();
    for (int trial = 0; trial < 10; ++trial) {
      const Mat Adg = adjoint_action(rep, group_exp(rep, rng.vector(d, 0.4)));
      const Vec X = rng.vector(d, 1.0);
      const Vec Y = rng.vector(d, 1.0);
      CHECK((Adg * L.bracket(X, Y) - L.bracket(Adg * X, Adg * Y)).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
}

TEST_CASE("log derivatives ignore translation on the opposite side") {
  const MatrixRep so3 = rep_preset("so3");
  RandomStream rng(kDefaultSeed);
  const Vec X = rng.vector(3, 0.5);
  const Vec Y = rng.vector(3, 0.5);
  const Box box = Box::cube(2, 1.0);
  const Mat g0 = group_exp(so3, rng.vector(3, 0.7));

  auto base = [&](const Vec& x) {
    return Mat(group_exp(so3, x(0) * X) * group_exp(so3, x(1) * Y));
  };
  const auto a = GroupValuedMap::sampled(box, 3, base);
  const auto left_shifted = GroupValuedMap::sampled(box, 3, [&](const Vec& x) {
    return Mat(g0 * base(x));
  });
  const auto right_shifted = GroupValuedMap::sampled(box, 3, [&](const Vec& x) {
    return Mat(base(x) * g0);
  });

  const FormField dl = left_log_derivative(so3, a);
  const FormField dl_shift = left_log_derivative(so3, left_shifted);
  const FormField dr = right_log_derivative(so3, a);
  const FormField dr_shift = right_log_derivative(so3, right_shifted);

  for (const Vec& x : sample_box(box, 6, kDefaultSeed)) {
    const Vec v = rng.vector(2, 1.0);
    CHECK((dl.eval(x, {v}) - dl_shift.eval(x, {v})).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((dr.eval(x, {v}) - dr_shift.eval(x, {v})).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("log derivative of a constant map vanishes") {
  const MatrixRep sl2 = rep_preset("sl2");
  RandomStream rng(kDefaultSeed);
  const Mat g0 = group_exp(sl2, rng.vector(3, 0.4));
  const auto a = GroupValuedMap::sampled(Box::cube(2, 1.0), 2, [g0](const Vec&) { return g0; });
  const FormField dl = left_log_derivative(sl2, a);
  Vec x(2), v(2);
  x << 0.2, -0.3;
  v << 1.0, 0.5;
  CHECK(dl.eval(x, {v}).cwiseAbs().maxCoeff() <= 1e-10);
}
