#include "cartanlab/developing.hpp"

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "cartanlab/sampling.hpp"

namespace cartanlab {

namespace {

double smoothstep(double u) { return u * u * u * (u * (6.0 * u - 15.0) + 10.0); }
double smoothstep_rate(double u) { return 30.0 * u * u * (u - 1.0) * (u - 1.0); }

Mat rk4_step(const Mat& M, const Mat& A0, const Mat& Amid, const Mat& A1, double h) {
  const Mat k1 = M * A0;
  const Mat k2 = (M + 0.5 * h * k1) * Amid;
  const Mat k3 = (M + 0.5 * h * k2) * Amid;
  const Mat k4 = (M + h * k3) * A1;
  return M + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Mat correct_drift(const std::string& algebra_name, Mat M) {
  const int n = static_cast<int>(M.rows());
  if (algebra_name.starts_with("so")) {
    if ((M.transpose() * M - Mat::Identity(n, n)).norm() > 1e-9) {
      Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
      M = svd.matrixU() * svd.matrixV().transpose();
    }
  } else if (algebra_name.starts_with("sl")) {
    const double det = M.determinant();
    if (det > 0.0 && std::abs(det - 1.0) > 1e-9)
      M /= std::pow(det, 1.0 / n);
  }
  return M;
}

} // namespace

Path Path::polynomial(std::vector<Vec> coefficients) {
  require(!coefficients.empty(), Err::InvalidArgument, "path needs at least one coefficient");
  const int dim = static_cast<int>(coefficients.front().size());
  for (const Vec& c : coefficients)
    require(static_cast<int>(c.size()) == dim, Err::DimensionMismatch,
            "path coefficients of mixed dimension");
  Path p;
  p.m_dim = dim;
  p.m_point = [coefficients, dim](double t) {
    Vec v = Vec::Zero(dim);
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) v = t * v + *it;
    return v;
  };
  p.m_velocity = [coefficients, dim](double t) {
    Vec v = Vec::Zero(dim);
    for (std::size_t k = coefficients.size(); k-- > 1;)
      v = t * v + static_cast<double>(k) * coefficients[k];
    return v;
  };
  return p;
}

Path Path::segment(Vec from, Vec to) {
  Vec delta = to - from;
  return polynomial({std::move(from), std::move(delta)});
}

Path Path::smooth_polyline(std::vector<Vec> control_points) {
  require(control_points.size() >= 2, Err::InvalidArgument, "polyline needs two control points");
  const int dim = static_cast<int>(control_points.front().size());
  for (const Vec& c : control_points)
    require(static_cast<int>(c.size()) == dim, Err::DimensionMismatch,
            "control points of mixed dimension");
  const int segments = static_cast<int>(control_points.size()) - 1;
  Path p;
  p.m_dim = dim;
  p.m_point = [control_points, segments](double t) {
    const double u = t * segments;
    const int i = std::min(std::max(static_cast<int>(std::floor(u)), 0), segments - 1);
    const double local = u - i;
    return Vec(control_points[i] +
               smoothstep(local) * (control_points[i + 1] - control_points[i]));
  };
  p.m_velocity = [control_points, segments](double t) {
    const double u = t * segments;
    const int i = std::min(std::max(static_cast<int>(std::floor(u)), 0), segments - 1);
    const double local = u - i;
    return Vec(smoothstep_rate(local) * segments *
               (control_points[i + 1] - control_points[i]));
  };
  return p;
}

bool Path::closed() const { return (point(0.0) - point(1.0)).norm() <= 1e-12; }

double Path::consistency_residual(int samples) const {
  const double h = 1e-5;
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double t = (k + 0.5) / samples;
    const Vec fd = (point(t + h) - point(t - h)) / (2.0 * h);
    worst = std::max(worst, (fd - velocity(t)).norm());
  }
  return worst;
}

bool Path::stays_inside(const Box& box, int samples) const {
  for (int k = 0; k <= samples; ++k)
    if (!box.contains(point(static_cast<double>(k) / samples))) return false;
  return true;
}

double mc_residual(const FormField& kappa, const LieAlgebra& h, MaurerCartanConvention convention,
                   int samples, std::uint64_t seed) {
  require(kappa.degree() == 1, Err::InvalidArgument, "Maurer-Cartan residual needs a 1-form");
  require(kappa.target_dim() == h.dim(), Err::DimensionMismatch,
          "form values do not live in the algebra");
  const double sign = convention == MaurerCartanConvention::Right ? 1.0 : -1.0;
  const FormField expr = exterior_derivative(kappa) + sign * 0.5 * wedge_bracket(kappa, kappa, h);
  RandomStream rng(seed);
  double worst = 0.0;
  for (const Vec& x : sample_box(kappa.domain().shrunk(kBoxMargin), samples, seed)) {
    const std::vector<Vec> args = {rng.vector(kappa.chart_dim(), 1.0),
                                   rng.vector(kappa.chart_dim(), 1.0)};
    worst = std::max(worst, expr.eval(x, args).norm());
  }
  return worst;
}

DevelopedPath develop(const FormField& kappa, const MatrixRep& rep, const Path& path,
                      const Mat& start, int steps) {
  require(kappa.degree() == 1, Err::InvalidArgument, "development needs a 1-form");
  require(rep.algebra().dim() == kappa.target_dim(), Err::DimensionMismatch,
          "representation does not match the form's values");
  require(path.dim() == kappa.chart_dim(), Err::DimensionMismatch,
          "path lives on a different chart");
  const int d = rep.mat_dim();
  require(start.rows() == d && start.cols() == d, Err::DimensionMismatch,
          "start element has the wrong size");
  require(steps >= 1, Err::InvalidArgument, "need at least one step");

  auto rhs = [&](double t) {
    return Mat(rep.map(kappa.eval(path.point(t), {path.velocity(t)})));
  };

  DevelopedPath out;
  out.nodes.reserve(static_cast<std::size_t>(steps) + 1);
  out.nodes.push_back(start);

  const double h = 1.0 / steps;
  Mat M = start;
  Mat A0 = rhs(0.0);
  int rough_streak = 0;
  for (int n = 0; n < steps; ++n) {
    const double t = static_cast<double>(n) / steps;
    const Mat Aq = rhs(t + 0.25 * h);
    const Mat Am = rhs(t + 0.5 * h);
    const Mat A3q = rhs(t + 0.75 * h);
    const Mat A1 = rhs(static_cast<double>(n + 1) / steps);

    const Mat full = rk4_step(M, A0, Am, A1, h);
    const Mat halves = rk4_step(rk4_step(M, A0, Aq, Am, 0.5 * h), Am, A3q, A1, 0.5 * h);
    const double err = (full - halves).norm() / 15.0;
    out.max_step_error = std::max(out.max_step_error, err);
    if (err > 1e-6) {
      if (++rough_streak >= 3)
        fail(Err::StepUnstable, "step-doubling estimate stayed above 1e-6");
    } else {
      rough_streak = 0;
    }

    M = halves;
    if ((n + 1) % 64 == 0) M = correct_drift(rep.algebra().name(), std::move(M));
    out.nodes.push_back(M);
    A0 = A1;
  }
  return out;
}

double development_residual(const DevelopedPath& sol, const FormField& kappa,
                            const MatrixRep& rep, const Path& path) {
  const int N = static_cast<int>(sol.nodes.size()) - 1;
  require(N >= 4, Err::InvalidArgument, "need at least four steps to check the solution");
  const double h = 1.0 / N;
  const int stride = std::max(1, N / 10);
  double worst = 0.0;
  for (int i = 2; i + 2 <= N; i += stride) {
    const Mat rate = (-sol.nodes[i + 2] + 8.0 * sol.nodes[i + 1] - 8.0 * sol.nodes[i - 1] +
                      sol.nodes[i - 2]) /
                     (12.0 * h);
    const double t = static_cast<double>(i) / N;
    const Mat expected = rep.map(kappa.eval(path.point(t), {path.velocity(t)}));
    const Mat defect = sol.nodes[i].fullPivLu().solve(rate) - expected;
    worst = std::max(worst, defect.norm());
  }
  return worst;
}

Mat holonomy(const FormField& kappa, const MatrixRep& rep, const Path& loop, int steps) {
  require(loop.closed(), Err::InvalidArgument, "holonomy needs a closed loop");
  return develop(kappa, rep, loop, Mat::Identity(rep.mat_dim(), rep.mat_dim()), steps)
      .endpoint();
}

FormField flat_pullback(const FormField& kappa, const MultilinearFunction& f) {
  require(kappa.degree() == 1, Err::InvalidArgument, "pullback needs a 1-form");
  require(f.dim() == kappa.target_dim(), Err::DimensionMismatch,
          "function does not match the form's values");
  require(f.arity() == 1 || f.symmetry() == Symmetry::Alternating, Err::InvalidArgument,
          "pullback needs an alternating function");
  double factorial = 1.0;
  for (int k = 2; k <= f.arity(); ++k) factorial *= k;
  const std::vector<FormField> slots(static_cast<std::size_t>(f.arity()), kappa);
  return (1.0 / factorial) * apply_multilinear(f, slots);
}

} // namespace cartanlab
