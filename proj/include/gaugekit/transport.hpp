#ifndef GAUGEKIT_TRANSPORT_HPP
#define GAUGEKIT_TRANSPORT_HPP

#include "gaugekit/gstruct.hpp"

namespace gaugekit {

/// One smooth piece of a path: n coordinate expressions in the parameter
/// t, written as x1, running over [0, 1].
struct PathSegment {
  std::vector<Expr> coords;
};

/// A piecewise-smooth path in a chart, the concatenation of smooth
/// segments. Rectangles are four line segments; circles are one segment.
class PathSpec {
public:
  PathSpec(int dimension, std::vector<PathSegment> segments);

  static PathSpec from_exprs(int dimension, std::vector<Expr> coords);
  static PathSpec line(const Point& from, const Point& to);
  /// Axis-aligned rectangle in the (axis_a, axis_b) plane through `center`.
  static PathSpec rectangle(const Point& center, int axis_a, int axis_b, double half_a,
                            double half_b);
  static PathSpec circle(const Point& center, int axis_a, int axis_b, double radius);
  /// Concatenation; the second path must start where the first ends.
  static PathSpec concatenate(const PathSpec& first, const PathSpec& second,
                              double tol = 1e-9);
  PathSpec reversed() const;

  int dimension() const noexcept { return dimension_; }
  int segment_count() const { return static_cast<int>(segments_.size()); }
  const std::vector<PathSegment>& segments() const noexcept { return segments_; }

  /// Position and velocity within one segment, local t in [0, 1].
  void eval(int segment, double t, Point& position, Point& velocity) const;
  Point position(int segment, double t) const;

  Point start() const;
  Point end() const;
  bool closed(double tol = 1e-12) const;

private:
  int dimension_;
  std::vector<PathSegment> segments_;
};

/// Parallel transport of d + A along the path: solves
/// P'(t) = -(sum_k A_k(x(t)) x_k'(t)) P(t), P(0) = I with classical RK4,
/// `steps` split across the segments. The path must stay inside the chart.
Matrix transport(const Connection& c, const PathSpec& path, int steps);

enum class HolonomyGroup { GL, SO, Sp };

/// Transport matrix around a loop together with the membership residuals
/// that apply to the claim being certified.
struct HolonomyReport {
  Matrix H;
  std::map<std::string, double> residuals;
  int steps = 0;
};

/// Certifies trivial monodromy of the flat ambient connection: for each
/// closed loop, the RK4 transport H is compared against the identity and
/// against the transporter prediction g~(end) g~(start)^{-1}.
std::vector<HolonomyReport> monodromy_check(const FlatPresentation& fp,
                                            std::span<const PathSpec> loops, int steps);

/// Membership residuals of a single matrix: GL checks invertibility, SO
/// checks H^T phi H = phi and det H = 1, Sp checks H^T phi H = phi with
/// antisymmetric phi. Without an explicit structure, SO uses phi = I and
/// Sp the canonical antisymmetric pairing.
HolonomyReport group_membership(const Matrix& H, const std::optional<BilinearStructure>& s,
                                HolonomyGroup group);

/// The certification family: rectangles and circles at three scales around
/// three seeded base points (out-and-back lines when the chart is a
/// 1-dimensional box).
std::vector<PathSpec> loop_family(const ChartDomain& box, std::uint64_t seed);

}  // namespace gaugekit

#endif
