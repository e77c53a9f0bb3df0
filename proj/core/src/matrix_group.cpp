#include "cartanlab/matrix_group.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "cartanlab/error.hpp"

namespace cartanlab {

Mat group_exp(const MatrixRep& rep, const Vec& x) { return rep.map(x).exp(); }

Vec group_log(const MatrixRep& rep, const Mat& g) {
  require(g.rows() == g.cols() && g.rows() == rep.mat_dim(), Err::DimensionMismatch,
          "group element size does not match the representation");
  const Mat dev = g - Mat::Identity(g.rows(), g.cols());
  const double radius = dev.eigenvalues().cwiseAbs().maxCoeff();
  require(radius < 1.0, Err::OutOfBranch,
          "element outside the principal log branch (spectral radius of g - I is " +
              std::to_string(radius) + ")");
  const Mat L = g.log();
  double resid = 0.0;
  const Vec x = rep.project(L, &resid);
  require(resid <= 1e-8 * (1.0 + L.norm()), Err::NotInAlgebra,
          "matrix log leaves the algebra span");
  return x;
}

Mat adjoint_action(const MatrixRep& rep, const Mat& g) {
  require(g.rows() == g.cols() && g.rows() == rep.mat_dim(), Err::DimensionMismatch,
          "group element size does not match the representation");
  const int d = rep.algebra().dim();
  const Mat ginv = g.inverse();
  Mat out(d, d);
  for (int i = 0; i < d; ++i) {
    const Mat conj = g * rep.generator(i) * ginv;
    double resid = 0.0;
    out.col(i) = rep.project(conj, &resid);
    require(resid <= 1e-9 * (1.0 + conj.norm()), Err::SubgroupViolation,
            "conjugation leaves the algebra span; the element does not normalize it");
  }
  return out;
}

Mat phi1(const Mat& M) {
  const int n = static_cast<int>(M.rows());
  Mat acc = Mat::Identity(n, n);
  Mat term = Mat::Identity(n, n);
  for (int k = 1; k <= 80; ++k) {
    term = (-1.0 / (k + 1.0)) * (term * M);
    acc += term;
    if (term.norm() <= 1e-17 * (1.0 + acc.norm())) break;
  }
  return acc;
}

GroupValuedMap GroupValuedMap::sampled(Box domain, int mat_dim,
                                       std::function<Mat(const Vec&)> eval) {
  require(static_cast<bool>(eval), Err::InvalidArgument, "group map needs an evaluator");
  GroupValuedMap m;
  m.m_domain = std::move(domain);
  m.m_mat_dim = mat_dim;
  m.m_eval = std::move(eval);
  return m;
}

GroupValuedMap GroupValuedMap::exp_of_polynomial(const MatrixRep& rep, Box domain,
                                                 PolynomialMap P) {
  require(P.size() == rep.algebra().dim(), Err::DimensionMismatch,
          "polynomial curve must map into the algebra");
  require(P.nvars() == domain.dim(), Err::DimensionMismatch,
          "polynomial curve must be defined on the chart");
  GroupValuedMap m;
  m.m_domain = std::move(domain);
  m.m_mat_dim = rep.mat_dim();
  m.m_eval = [rep, P](const Vec& x) { return Mat(rep.map(P.eval(x)).exp()); };
  return m;
}

namespace {

FormField log_derivative(const MatrixRep& rep, const GroupValuedMap& a, bool left) {
  require(a.mat_dim() == rep.mat_dim(), Err::DimensionMismatch,
          "group map does not match the representation");
  const int m = a.mat_dim();
  auto eval = [rep, a, left, m](const Vec& x, const std::vector<Vec>& args) {
    auto flat = [&a, m](const Vec& y) {
      const Mat g = a.eval(y);
      return Vec(Eigen::Map<const Vec>(g.data(), m * m));
    };
    const Vec dv = directional_derivative(flat, x, args[0], 0);
    const Mat da = Eigen::Map<const Mat>(dv.data(), m, m);
    const Mat ainv = a.eval(x).inverse();
    const Mat v = left ? Mat(ainv * da) : Mat(da * ainv);
    double resid = 0.0;
    const Vec coords = rep.project(v, &resid);
    require(resid <= 1e-6 * (1.0 + v.norm()), Err::NotInAlgebra,
            "logarithmic derivative leaves the algebra span");
    return coords;
  };
  return FormField::sampled(a.domain(), 1, rep.algebra().dim(), eval, 1);
}

} // namespace

FormField left_log_derivative(const MatrixRep& rep, const GroupValuedMap& a) {
  return log_derivative(rep, a, true);
}

FormField right_log_derivative(const MatrixRep& rep, const GroupValuedMap& a) {
  return log_derivative(rep, a, false);
}

} // namespace cartanlab
