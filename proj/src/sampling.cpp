#include "gaugekit/sampling.hpp"

#include <cmath>

namespace gaugekit {

namespace {

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                           31, 37, 41, 43, 47, 53, 59, 61, 67, 71};

double radical_inverse(std::uint64_t index, int base) {
  double inv_base = 1.0 / base;
  double factor = inv_base;
  double value = 0.0;
  while (index > 0) {
    value += static_cast<double>(index % base) * factor;
    index /= base;
    factor *= inv_base;
  }
  return value;
}

}  // namespace

std::vector<Point> sample_points(const ChartDomain& box, int count, std::uint64_t seed) {
  if (count < 0) throw ShapeError("sample_points: negative count");
  const int n = box.dimension();
  if (n > static_cast<int>(sizeof(kPrimes) / sizeof(kPrimes[0])))
    throw ShapeError("sample_points: dimension too large");
  std::vector<Point> out;
  out.reserve(count);
  const std::uint64_t offset = 1 + (seed % 100003) * 131;
  for (int j = 0; j < count; ++j) {
    Point x(n);
    for (int k = 0; k < n; ++k) {
      const double u = radical_inverse(offset + static_cast<std::uint64_t>(j), kPrimes[k]);
      x[k] = box.lower(k) + u * box.width(k);
    }
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<QuadNode> gauss_legendre(int nodes) {
  if (nodes < 1) throw ShapeError("gauss_legendre: need at least one node");
  std::vector<QuadNode> out(nodes);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < (nodes + 1) / 2; ++i) {
    // Newton iteration on P_n with the Chebyshev initial guess.
    double x = std::cos(pi * (i + 0.75) / (nodes + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= nodes; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = nodes * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // transform from [-1, 1] to [0, 1]
    out[i] = {0.5 * (1.0 - x), 0.5 * w};
    out[nodes - 1 - i] = {0.5 * (1.0 + x), 0.5 * w};
  }
  return out;
}

}  // namespace gaugekit
