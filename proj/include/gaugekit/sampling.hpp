#ifndef GAUGEKIT_SAMPLING_HPP
#define GAUGEKIT_SAMPLING_HPP

#include <cstdint>
#include <vector>

#include "gaugekit/chart.hpp"

namespace gaugekit {

/// Deterministic low-discrepancy sample points inside the chart box
/// (Halton sequence, leaped by the seed). Identical inputs give identical
/// points on every platform.
std::vector<Point> sample_points(const ChartDomain& box, int count, std::uint64_t seed);

struct QuadNode {
  double t;
  double weight;
};

/// Gauss-Legendre nodes and weights on [0, 1].
std::vector<QuadNode> gauss_legendre(int nodes);

}  // namespace gaugekit

#endif
