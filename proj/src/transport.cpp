#include "gaugekit/transport.hpp"

#include <cmath>

namespace gaugekit {

namespace {

Expr line_coord(double from, double to) {
  // from + (to - from) * t, with t spelled as x1
  if (from == to) return Expr::literal(Complex(from, 0));
  return Expr::literal(Complex(from, 0)) +
         Expr::literal(Complex(to - from, 0)) * Expr::coordinate(0);
}

}  // namespace

PathSpec::PathSpec(int dimension, std::vector<PathSegment> segments)
    : dimension_(dimension), segments_(std::move(segments)) {
  if (dimension_ < 1) throw ShapeError("PathSpec: dimension must be >= 1");
  if (segments_.empty()) throw ShapeError("PathSpec: no segments");
  for (const auto& seg : segments_)
    if (static_cast<int>(seg.coords.size()) != dimension_)
      throw ShapeError("PathSpec: segment coordinate count mismatch");
}

PathSpec PathSpec::from_exprs(int dimension, std::vector<Expr> coords) {
  return PathSpec(dimension, {PathSegment{std::move(coords)}});
}

PathSpec PathSpec::line(const Point& from, const Point& to) {
  if (from.size() != to.size()) throw ShapeError("PathSpec::line: endpoint size mismatch");
  PathSegment seg;
  for (int k = 0; k < from.size(); ++k) seg.coords.push_back(line_coord(from[k], to[k]));
  return PathSpec(static_cast<int>(from.size()), {std::move(seg)});
}

PathSpec PathSpec::rectangle(const Point& center, int axis_a, int axis_b, double half_a,
                             double half_b) {
  const int n = static_cast<int>(center.size());
  if (axis_a < 0 || axis_b < 0 || axis_a >= n || axis_b >= n || axis_a == axis_b)
    throw ShapeError("PathSpec::rectangle: bad axes");
  auto corner = [&](int sa, int sb) {
    Point p = center;
    p[axis_a] += sa * half_a;
    p[axis_b] += sb * half_b;
    return p;
  };
  std::vector<PathSegment> segs;
  const Point c00 = corner(-1, -1), c10 = corner(1, -1), c11 = corner(1, 1),
              c01 = corner(-1, 1);
  for (const auto& [from, to] :
       {std::pair{c00, c10}, std::pair{c10, c11}, std::pair{c11, c01}, std::pair{c01, c00}}) {
    PathSegment seg;
    for (int k = 0; k < n; ++k) seg.coords.push_back(line_coord(from[k], to[k]));
    segs.push_back(std::move(seg));
  }
  return PathSpec(n, std::move(segs));
}

PathSpec PathSpec::circle(const Point& center, int axis_a, int axis_b, double radius) {
  const int n = static_cast<int>(center.size());
  if (axis_a < 0 || axis_b < 0 || axis_a >= n || axis_b >= n || axis_a == axis_b)
    throw ShapeError("PathSpec::circle: bad axes");
  const double two_pi = 2.0 * std::acos(-1.0);
  PathSegment seg;
  for (int k = 0; k < n; ++k) {
    if (k == axis_a) {
      seg.coords.push_back(Expr::literal(Complex(center[k], 0)) +
                           Expr::literal(Complex(radius, 0)) *
                               cos(Expr::literal(Complex(two_pi, 0)) * Expr::coordinate(0)));
    } else if (k == axis_b) {
      seg.coords.push_back(Expr::literal(Complex(center[k], 0)) +
                           Expr::literal(Complex(radius, 0)) *
                               sin(Expr::literal(Complex(two_pi, 0)) * Expr::coordinate(0)));
    } else {
      seg.coords.push_back(Expr::literal(Complex(center[k], 0)));
    }
  }
  return PathSpec(n, {std::move(seg)});
}

PathSpec PathSpec::concatenate(const PathSpec& first, const PathSpec& second, double tol) {
  if (first.dimension() != second.dimension())
    throw ShapeError("PathSpec::concatenate: dimension mismatch");
  if ((first.end() - second.start()).norm() > tol)
    throw ShapeError("PathSpec::concatenate: paths do not join");
  std::vector<PathSegment> segs = first.segments_;
  segs.insert(segs.end(), second.segments_.begin(), second.segments_.end());
  return PathSpec(first.dimension(), std::move(segs));
}

PathSpec PathSpec::reversed() const {
  // reparametrize each segment by 1 - t and reverse the segment order
  Expr one_minus_t = Expr::literal(Complex(1, 0)) - Expr::coordinate(0);
  std::vector<PathSegment> segs;
  segs.reserve(segments_.size());
  for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) {
    PathSegment seg;
    seg.coords.reserve(it->coords.size());
    for (const Expr& e : it->coords) seg.coords.push_back(substitute(e, 0, one_minus_t));
    segs.push_back(std::move(seg));
  }
  return PathSpec(dimension_, std::move(segs));
}

void PathSpec::eval(int segment, double t, Point& position, Point& velocity) const {
  const PathSegment& seg = segments_.at(segment);
  position.resize(dimension_);
  velocity.resize(dimension_);
  Point param(1);
  param[0] = t;
  for (int k = 0; k < dimension_; ++k) {
    ScalarJet j = seg.coords[k].eval(param, 1);
    if (std::abs(j.value.imag()) > 1e-12 || std::abs(j.first(0).imag()) > 1e-12)
      throw EvalError("PathSpec: path coordinates must be real-valued");
    position[k] = j.value.real();
    velocity[k] = j.first(0).real();
  }
}

Point PathSpec::position(int segment, double t) const {
  Point pos, vel;
  eval(segment, t, pos, vel);
  return pos;
}

Point PathSpec::start() const { return position(0, 0.0); }

Point PathSpec::end() const { return position(segment_count() - 1, 1.0); }

bool PathSpec::closed(double tol) const { return (end() - start()).norm() <= tol; }

// ---------------------------------------------------------------------------
// Transport
// ---------------------------------------------------------------------------

namespace {

// RK4 for P' = K(t) P over the path's segments; `generator` supplies K.
template <class Generator>
Matrix transport_core(int rank, const PathSpec& path, int steps, Generator&& generator) {
  if (steps < 16) throw ShapeError("transport: need at least 16 steps");
  const int segments = path.segment_count();
  const int per_segment = std::max(4, steps / segments);

  Matrix p = Matrix::Identity(rank, rank);
  for (int seg = 0; seg < segments; ++seg) {
    const double h = 1.0 / per_segment;
    Matrix k_right = generator(seg, 0.0);
    for (int i = 0; i < per_segment; ++i) {
      const double t0 = i * h;
      const Matrix k_left = std::move(k_right);
      const Matrix k_mid = generator(seg, t0 + 0.5 * h);
      k_right = generator(seg, t0 + h);
      const Matrix s1 = k_left * p;
      const Matrix s2 = k_mid * (p + (0.5 * h) * s1);
      const Matrix s3 = k_mid * (p + (0.5 * h) * s2);
      const Matrix s4 = k_right * (p + h * s3);
      p += (h / 6.0) * (s1 + 2.0 * s2 + 2.0 * s3 + s4);
    }
  }
  return p;
}

}  // namespace

Matrix transport(const Connection& c, const PathSpec& path, int steps) {
  if (path.dimension() != c.dimension())
    throw ShapeError("transport: path dimension does not match the chart");
  // K(t) = -sum_k A_k(x(t)) dx_k/dt, checked against the chart bounds
  return transport_core(c.rank(), path, steps, [&](int segment, double t) {
    Point pos, vel;
    path.eval(segment, t, pos, vel);
    if (!c.domain().contains(pos))
      throw EvalError("transport: path exits the chart domain");
    FieldEvalContext ctx(pos);
    return Matrix(-c.eval_combination(ctx, vel));
  });
}

std::vector<HolonomyReport> monodromy_check(const FlatPresentation& fp,
                                            std::span<const PathSpec> loops, int steps) {
  const int m = fp.ambient_rank;
  const ChartDomain& domain = fp.source.domain();
  // K(t) for B = -d g~ g~^{-1} collapses to (sum_k v_k d_k g~) g~^{-1}:
  // one order-1 jet of g~ and one solve per stage point.
  auto ambient_generator = [&](const PathSpec& loop) {
    return [&fp, &domain, &loop](int segment, double t) {
      Point pos, vel;
      loop.eval(segment, t, pos, vel);
      if (!domain.contains(pos))
        throw EvalError("transport: path exits the chart domain");
      FieldEvalContext ctx(pos);
      const MatrixJet& jet = ctx.eval(fp.transporter, 1);
      Matrix directional = vel[0] * jet.first(0);
      for (int k = 1; k < static_cast<int>(vel.size()); ++k)
        if (vel[k] != 0.0) directional += vel[k] * jet.first(k);
      return Matrix(Eigen::PartialPivLU<Matrix>(jet.value().transpose())
                        .solve(directional.transpose())
                        .transpose());
    };
  };
  std::vector<HolonomyReport> out;
  out.reserve(loops.size());
  for (const PathSpec& loop : loops) {
    if (!loop.closed()) throw ShapeError("monodromy_check: open path supplied");
    HolonomyReport report;
    report.steps = steps;
    report.H = transport_core(m, loop, steps, ambient_generator(loop));
    report.residuals["identity"] =
        (report.H - Matrix::Identity(m, m)).cwiseAbs().maxCoeff();
    // Independent certificate: transport under B = -dg~ g~^{-1} is
    // g~(end) g~(start)^{-1}, the identity on a closed loop.
    Matrix g_end = fp.transporter.value(loop.end());
    Matrix g_start_inv = fp.transporter_inv.value(loop.start());
    Matrix predicted = g_end * g_start_inv;
    report.residuals["transporter"] = (report.H - predicted).cwiseAbs().maxCoeff();
    out.push_back(std::move(report));
  }
  return out;
}

HolonomyReport group_membership(const Matrix& H, const std::optional<BilinearStructure>& s,
                                HolonomyGroup group) {
  if (H.rows() != H.cols()) throw ShapeError("group_membership: H must be square");
  const int m = static_cast<int>(H.rows());
  HolonomyReport report;
  report.H = H;
  const double abs_det = std::abs(H.determinant());
  report.residuals["abs_det"] = abs_det;
  if (abs_det <= 1e-10) throw ShapeError("group_membership: H is numerically singular");
  if (group == HolonomyGroup::GL) return report;

  Matrix phi;
  if (s) {
    if (s->size() != m) throw ShapeError("group_membership: structure size mismatch");
    const bool want_antisymmetric = group == HolonomyGroup::Sp;
    if (want_antisymmetric != (s->kind() == PairingKind::antisymmetric))
      throw ShapeError("group_membership: structure kind does not match the group");
    phi = s->matrix();
  } else if (group == HolonomyGroup::SO) {
    phi = Matrix::Identity(m, m);
  } else {
    if (m % 2 != 0) throw ShapeError("group_membership: Sp needs even dimension");
    phi = canonical_pairing(m / 2, PairingKind::antisymmetric).matrix();
  }
  report.residuals["phi_invariance"] = (H.transpose() * phi * H - phi).cwiseAbs().maxCoeff();
  if (group == HolonomyGroup::SO)
    report.residuals["det_one"] = std::abs(H.determinant() - Complex(1, 0));
  return report;
}

std::vector<PathSpec> loop_family(const ChartDomain& box, std::uint64_t seed) {
  const int n = box.dimension();
  // base points in the middle half of the box, so every loop fits
  std::vector<Point> raw = sample_points(box, 3, seed);
  std::vector<PathSpec> loops;
  const double scales[3] = {0.9, 0.5, 0.25};
  int which = 0;
  for (int ci = 0; ci < 3; ++ci) {
    Point center = box.center() + 0.5 * (raw[ci] - box.center());
    double margin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
      margin = std::min(margin, center[k] - box.lower(k));
      margin = std::min(margin, box.upper(k) - center[k]);
    }
    for (double scale : scales) {
      const double extent = margin * scale * 0.95;
      if (n == 1) {
        Point a = center, b = center;
        a[0] -= extent;
        b[0] += extent;
        loops.push_back(PathSpec::concatenate(PathSpec::line(a, b), PathSpec::line(b, a)));
      } else {
        const int axis_a = which % n;
        const int axis_b = (which + 1) % n;
        if (which % 2 == 0)
          loops.push_back(PathSpec::rectangle(center, axis_a, axis_b, extent, extent * 0.75));
        else
          loops.push_back(PathSpec::circle(center, axis_a, axis_b, extent));
      }
      ++which;
    }
  }
  return loops;
}

}  // namespace gaugekit
