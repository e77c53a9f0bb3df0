#include "cartanlab/presets.hpp"

#include <cmath>

namespace cartanlab {

namespace {

Mat unit(int d, int r, int c) {
  Mat m = Mat::Zero(d, d);
  m(r, c) = 1.0;
  return m;
}

std::vector<Mat> so_basis(int n) {
  if (n == 2) {
    Mat j(2, 2);
    j << 0, -1, 1, 0;
    return {j};
  }
  if (n == 3) {
    Mat lx = Mat::Zero(3, 3), ly = Mat::Zero(3, 3), lz = Mat::Zero(3, 3);
    lx(1, 2) = -1; lx(2, 1) = 1;
    ly(0, 2) = 1;  ly(2, 0) = -1;
    lz(0, 1) = -1; lz(1, 0) = 1;
    return {lx, ly, lz};
  }
  std::vector<Mat> basis;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) basis.push_back(unit(n, b, a) - unit(n, a, b));
  return basis;
}

std::vector<Mat> gl_basis(int n) {
  std::vector<Mat> basis;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) basis.push_back(unit(n, i, j));
  return basis;
}

std::vector<Mat> co_basis(int n) {
  std::vector<Mat> basis{Mat::Identity(n, n)};
  for (const Mat& m : so_basis(n)) basis.push_back(m);
  return basis;
}

/// Affine block matrices acting on (x, 1); translations first.
std::vector<Mat> affine_basis(const std::vector<Mat>& linear_part, int n) {
  std::vector<Mat> basis;
  for (int a = 0; a < n; ++a) basis.push_back(unit(n + 1, a, n));
  for (const Mat& m : linear_part) {
    Mat big = Mat::Zero(n + 1, n + 1);
    big.topLeftCorner(n, n) = m;
    basis.push_back(big);
  }
  return basis;
}

std::vector<Mat> sl2_basis() {
  Mat h(2, 2), e(2, 2), f(2, 2);
  h << 1, 0, 0, -1;
  e << 0, 1, 0, 0;
  f << 0, 0, 1, 0;
  return {h, e, f};
}

struct PresetDef {
  std::vector<Mat> basis;
  GroupTag tag;
};

PresetDef preset_def(const std::string& name) {
  auto starts = [&](const char* p) { return name.rfind(p, 0) == 0; };
  auto suffix_int = [&](std::size_t at) -> int {
    if (name.size() != at + 1 || name[at] < '1' || name[at] > '9') return -1;
    return name[at] - '0';
  };
  if (starts("abelian")) {
    const int n = suffix_int(7);
    if (n >= 1 && n <= 4) {
      std::vector<Mat> basis;
      for (int i = 0; i < n; ++i) basis.push_back(unit(n, i, i));
      return {basis, GroupTag::Diagonal};
    }
  }
  if (name == "heisenberg3")
    return {{unit(3, 0, 1), unit(3, 1, 2), unit(3, 0, 2)}, GroupTag::UnitUpperTriangular};
  if (starts("so")) {
    const int n = suffix_int(2);
    if (n >= 2 && n <= 4) return {so_basis(n), GroupTag::Orthogonal};
  }
  if (name == "sl2") return {sl2_basis(), GroupTag::SpecialLinear};
  if (name == "sp2") return {sl2_basis(), GroupTag::Symplectic};
  if (starts("gl")) {
    const int n = suffix_int(2);
    if (n >= 1 && n <= 4) return {gl_basis(n), GroupTag::Generic};
  }
  if (starts("co")) {
    const int n = suffix_int(2);
    if (n >= 2 && n <= 4) return {co_basis(n), GroupTag::Generic};
  }
  if (starts("e") && name.size() == 2) {
    const int n = suffix_int(1);
    if (n >= 2 && n <= 3) return {affine_basis(so_basis(n), n), GroupTag::Euclidean};
  }
  if (starts("aff")) {
    const int n = suffix_int(3);
    if (n >= 1 && n <= 3) return {affine_basis(gl_basis(n), n), GroupTag::Affine};
  }
  if (name == "borel_sl2") {
    auto sl2 = sl2_basis();
    return {{sl2[0], sl2[1]}, GroupTag::Generic};
  }
  fail(Err::UnknownPreset, "algebra preset '" + name + "'");
}

} // namespace

std::vector<std::string> algebra_preset_names() {
  return {"abelian1", "abelian2", "abelian3", "abelian4", "heisenberg3", "so2", "so3",
          "so4",      "sl2",      "sp2",      "gl1",      "gl2",         "gl3", "gl4",
          "co2",      "co3",      "co4",      "e2",       "e3",          "aff1", "aff2",
          "aff3",     "borel_sl2"};
}

std::vector<std::string> pair_preset_names() {
  return {"sl2/borel", "sl2/so2", "so3/so2", "e2/so2", "e3/so3", "gl2/so2",
          "aff2/gl2",  "co3/so3"};
}

LieAlgebra algebra_preset(const std::string& name) {
  return algebra_from_matrices(name, preset_def(name).basis);
}

MatrixRep rep_preset(const std::string& name) {
  auto def = preset_def(name);
  return MatrixRep(algebra_from_matrices(name, def.basis), def.basis);
}

GroupPreset group_preset(const std::string& name) {
  auto def = preset_def(name);
  return GroupPreset{name, MatrixRep(algebra_from_matrices(name, def.basis), def.basis),
                     def.tag};
}

SubalgebraEmbedding pair_preset(const std::string& name) {
  const auto slash = name.find('/');
  require(slash != std::string::npos, Err::UnknownPreset,
          "pair preset '" + name + "' must have the form h/g");
  const std::string h_name = name.substr(0, slash);
  const std::string g_name = name.substr(slash + 1);
  const LieAlgebra h = algebra_preset(h_name);

  auto span_indices = [&](std::initializer_list<int> idx) {
    std::vector<Vec> basis;
    for (int i : idx) basis.push_back(Vec::Unit(h.dim(), i));
    return basis;
  };

  std::vector<Vec> basis;
  if (g_name == h_name) {
    for (int i = 0; i < h.dim(); ++i) basis.push_back(Vec::Unit(h.dim(), i));
  } else if (name == "sl2/borel") {
    basis = span_indices({0, 1});
  } else if (name == "sl2/so2" || name == "sp2/so2") {
    Vec j = Vec::Zero(3); // E - F spans the rotation subalgebra
    j[1] = 1.0;
    j[2] = -1.0;
    basis = {j};
  } else if (name == "so3/so2") {
    basis = span_indices({2});
  } else if (name == "e2/so2") {
    basis = span_indices({2});
  } else if (name == "e3/so3") {
    basis = span_indices({3, 4, 5});
  } else if (name == "gl2/so2") {
    Vec j = Vec::Zero(4); // E01 -> -1, E10 -> +1
    j[1] = -1.0;
    j[2] = 1.0;
    basis = {j};
  } else if (name == "aff2/gl2") {
    basis = span_indices({2, 3, 4, 5});
  } else if (name == "co3/so3") {
    basis = span_indices({1, 2, 3});
  } else {
    fail(Err::UnknownPreset, "pair preset '" + name + "'");
  }
  return make_subalgebra(h, g_name, basis);
}

double relation_residual(GroupTag tag, const Mat& g) {
  const int d = static_cast<int>(g.rows());
  switch (tag) {
    case GroupTag::Generic:
      return 0.0;
    case GroupTag::Diagonal: {
      Mat off = g;
      off.diagonal().setZero();
      return off.norm();
    }
    case GroupTag::Orthogonal:
      return (g.transpose() * g - Mat::Identity(d, d)).norm();
    case GroupTag::SpecialLinear:
      return std::abs(g.determinant() - 1.0);
    case GroupTag::Symplectic: {
      Mat j(2, 2);
      j << 0, 1, -1, 0;
      return (g.transpose() * j * g - j).norm();
    }
    case GroupTag::UnitUpperTriangular: {
      double r = (g.diagonal() - Vec::Ones(d)).norm();
      for (int i = 0; i < d; ++i)
        for (int k = 0; k < i; ++k) r = std::hypot(r, g(i, k));
      return r;
    }
    case GroupTag::Euclidean: {
      const int n = d - 1;
      double r = (g.topLeftCorner(n, n).transpose() * g.topLeftCorner(n, n) -
                  Mat::Identity(n, n))
                     .norm();
      r = std::hypot(r, (g.row(n).head(n)).norm());
      return std::hypot(r, g(n, n) - 1.0);
    }
    case GroupTag::Affine: {
      const int n = d - 1;
      double r = (g.row(n).head(n)).norm();
      return std::hypot(r, g(n, n) - 1.0);
    }
  }
  return 0.0;
}

Mat project_to_group(GroupTag tag, const Mat& g) {
  const int d = static_cast<int>(g.rows());
  switch (tag) {
    case GroupTag::Generic:
    case GroupTag::Symplectic:
      return g;
    case GroupTag::Diagonal: {
      Mat out = Mat::Zero(d, d);
      out.diagonal() = g.diagonal();
      return out;
    }
    case GroupTag::Orthogonal: {
      Eigen::JacobiSVD<Mat> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
      return svd.matrixU() * svd.matrixV().transpose();
    }
    case GroupTag::SpecialLinear: {
      const double det = g.determinant();
      require(det > 0.0, Err::NoSolution, "determinant sign flip during projection");
      return g / std::pow(det, 1.0 / d);
    }
    case GroupTag::UnitUpperTriangular: {
      Mat out = g;
      for (int i = 0; i < d; ++i) {
        out(i, i) = 1.0;
        for (int k = 0; k < i; ++k) out(i, k) = 0.0;
      }
      return out;
    }
    case GroupTag::Euclidean: {
      const int n = d - 1;
      Mat out = g;
      Eigen::JacobiSVD<Mat> svd(g.topLeftCorner(n, n),
                                Eigen::ComputeFullU | Eigen::ComputeFullV);
      out.topLeftCorner(n, n) = svd.matrixU() * svd.matrixV().transpose();
      out.row(n).head(n).setZero();
      out(n, n) = 1.0;
      return out;
    }
    case GroupTag::Affine: {
      Mat out = g;
      out.row(d - 1).head(d - 1).setZero();
      out(d - 1, d - 1) = 1.0;
      return out;
    }
  }
  return g;
}

} // namespace cartanlab
