#include "cartanlab/sampling.hpp"

namespace cartanlab {

namespace {

constexpr std::uint64_t kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                     31, 37, 41, 43, 47, 53, 59, 61, 67, 71};

} // namespace

double van_der_corput(std::uint64_t i, std::uint64_t base) {
  double x = 0.0, f = 1.0 / static_cast<double>(base);
  while (i > 0) {
    x += f * static_cast<double>(i % base);
    i /= base;
    f /= static_cast<double>(base);
  }
  return x;
}

std::vector<Vec> sample_box(const Box& box, int count, std::uint64_t seed) {
  const int n = box.dim();
  require(n <= static_cast<int>(std::size(kPrimes)), Err::DimensionMismatch,
          "sample_box supports at most 20 chart dimensions");
  const Box inner = box.shrunk(kBoxMargin);
  // Skip a seed-dependent prefix; the +1 avoids the degenerate first element.
  const std::uint64_t offset = 1 + (seed % 100003) * 127;
  std::vector<Vec> pts;
  pts.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Vec x(n);
    for (int d = 0; d < n; ++d) {
      const double u = van_der_corput(offset + static_cast<std::uint64_t>(k), kPrimes[d]);
      x[d] = inner.lo[d] + u * (inner.hi[d] - inner.lo[d]);
    }
    pts.push_back(std::move(x));
  }
  return pts;
}

} // namespace cartanlab
