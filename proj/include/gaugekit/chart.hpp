#ifndef GAUGEKIT_CHART_HPP
#define GAUGEKIT_CHART_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "gaugekit/errors.hpp"

namespace gaugekit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Point = Eigen::VectorXd;

/// A box-shaped coordinate chart in R^n. All fields, connections and paths
/// in this library live over one of these.
class ChartDomain {
public:
  ChartDomain(int dimension, std::vector<std::pair<double, double>> bounds)
      : n_(dimension), bounds_(std::move(bounds)) {
    if (n_ < 1) throw ShapeError("ChartDomain: dimension must be >= 1");
    if (static_cast<int>(bounds_.size()) != n_)
      throw ShapeError("ChartDomain: expected one interval per dimension");
    for (const auto& [lo, hi] : bounds_)
      if (!(lo <= hi)) throw ShapeError("ChartDomain: empty interval");
  }

  /// Unit cube [-1,1]^n.
  static ChartDomain unit(int dimension) {
    return ChartDomain(dimension,
                       std::vector<std::pair<double, double>>(dimension, {-1.0, 1.0}));
  }

  int dimension() const noexcept { return n_; }
  double lower(int k) const { return bounds_.at(k).first; }
  double upper(int k) const { return bounds_.at(k).second; }
  double width(int k) const { return upper(k) - lower(k); }

  Point center() const {
    Point c(n_);
    for (int k = 0; k < n_; ++k) c[k] = 0.5 * (lower(k) + upper(k));
    return c;
  }

  bool contains(const Point& x, double slack = 1e-9) const {
    if (x.size() != n_) return false;
    for (int k = 0; k < n_; ++k)
      if (x[k] < lower(k) - slack || x[k] > upper(k) + slack) return false;
    return true;
  }

private:
  int n_;
  std::vector<std::pair<double, double>> bounds_;
};

}  // namespace gaugekit

#endif
