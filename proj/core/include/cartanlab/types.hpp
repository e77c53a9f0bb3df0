#pragma once

#include <Eigen/Dense>

#include "cartanlab/error.hpp"

namespace cartanlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Axis-aligned chart domain.
struct Box {
  Vec lo;
  Vec hi;

  Box() = default;
  Box(Vec lo_, Vec hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
    require(lo.size() == hi.size(), Err::DimensionMismatch, "box bounds");
    require(lo.size() == 0 || (hi - lo).minCoeff() > 0, Err::InvalidArgument, "empty box");
  }

  /// Cube [-r, r]^n.
  static Box cube(int n, double r) {
    return Box(Vec::Constant(n, -r), Vec::Constant(n, r));
  }

  int dim() const { return static_cast<int>(lo.size()); }

  bool contains(const Vec& x) const {
    return x.size() == lo.size() && (x.array() >= lo.array()).all() &&
           (x.array() <= hi.array()).all();
  }

  /// Closed sub-box obtained by shrinking every side towards its center.
  Box shrunk(double margin_fraction) const {
    Vec c = 0.5 * (lo + hi), h = 0.5 * (1.0 - 2.0 * margin_fraction) * (hi - lo);
    return Box(c - h, c + h);
  }

  /// Concatenate two boxes into a product domain.
  static Box product(const Box& a, const Box& b) {
    Vec lo(a.dim() + b.dim()), hi(a.dim() + b.dim());
    lo.head(a.dim()) = a.lo;
    lo.tail(b.dim()) = b.lo;
    hi.head(a.dim()) = a.hi;
    hi.tail(b.dim()) = b.hi;
    return Box(lo, hi);
  }
};

} // namespace cartanlab
