#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "cartanlab/types.hpp"

namespace cartanlab {

/// Default seed for every deterministic sampling plan.
inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

/// Fraction of each chart side kept away from the boundary when sampling.
inline constexpr double kBoxMargin = 0.10;

/// i-th element of the van der Corput sequence in the given prime base.
double van_der_corput(std::uint64_t i, std::uint64_t base);

/// Low-discrepancy points inside the margin-shrunk box.  The seed enters as a
/// deterministic offset into the Halton sequence, so equal seeds give equal
/// plans and different seeds give disjoint ones.
std::vector<Vec> sample_box(const Box& box, int count, std::uint64_t seed = kDefaultSeed);

/// Seeded mt19937_64 stream for auxiliary draws (directions, coefficients).
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed = kDefaultSeed) : m_gen(seed) {}

  double uniform(double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(m_gen);
  }

  Vec vector(int n, double scale) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(-scale, scale);
    return v;
  }

  Mat matrix(int rows, int cols, double scale) {
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = uniform(-scale, scale);
    return m;
  }

  std::mt19937_64& engine() { return m_gen; }

private:
  std::mt19937_64 m_gen;
};

} // namespace cartanlab
