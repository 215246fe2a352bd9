#ifndef GAUGEKIT_FIELD_HPP
#define GAUGEKIT_FIELD_HPP

#include <memory>
#include <unordered_map>
#include <vector>

#include "gaugekit/expr.hpp"

namespace gaugekit {

namespace detail {
struct FieldNode;
}

class FieldEvalContext;

/// A smooth matrix-valued function on a chart domain, represented as an
/// immutable algebraic composite: expression grids, constants, sums,
/// products, adjoints, transposes, inverses, block assemblies, slices,
/// scalar multiples, partial derivatives, traces and affine pullbacks.
/// Shape consistency is enforced at construction; evaluation produces
/// exact jets up to order 3.
class SmoothMatrixField {
public:
  SmoothMatrixField() = default;

  static SmoothMatrixField constant(const Matrix& value);
  static SmoothMatrixField identity(int size);
  static SmoothMatrixField zero(int rows, int cols);
  /// 1x1 field from a scalar expression.
  static SmoothMatrixField from_expr(const Expr& e);
  /// Entrywise expression grid, row-major.
  static SmoothMatrixField from_grid(int rows, int cols, std::vector<Expr> entries);

  bool valid() const noexcept { return node_ != nullptr; }
  int rows() const;
  int cols() const;

  /// Jet at x with a private evaluation cache.
  MatrixJet eval_jet(const Point& x, int order) const;
  Matrix value(const Point& x) const;

  friend SmoothMatrixField operator+(const SmoothMatrixField&, const SmoothMatrixField&);
  friend SmoothMatrixField operator-(const SmoothMatrixField&, const SmoothMatrixField&);
  friend SmoothMatrixField operator*(const SmoothMatrixField&, const SmoothMatrixField&);
  friend SmoothMatrixField sum(std::vector<SmoothMatrixField> terms);
  friend SmoothMatrixField adjoint(const SmoothMatrixField&);
  friend SmoothMatrixField transpose(const SmoothMatrixField&);
  friend SmoothMatrixField inverse(const SmoothMatrixField&);
  friend SmoothMatrixField block(const std::vector<std::vector<SmoothMatrixField>>& grid);
  friend SmoothMatrixField slice(const SmoothMatrixField&, int row0, int col0, int rows,
                                 int cols);
  friend SmoothMatrixField scale(Complex c, const SmoothMatrixField&);
  /// Product with a 1x1 scalar field, broadcast over entries.
  friend SmoothMatrixField smul(const SmoothMatrixField& scalar, const SmoothMatrixField&);
  /// The partial-derivative field d_k f; evaluation at order m consumes
  /// order m+1 of f.
  friend SmoothMatrixField partial(int k, const SmoothMatrixField&);
  friend SmoothMatrixField trace(const SmoothMatrixField&);
  /// f composed with the affine map x = jacobian * y + offset.
  friend SmoothMatrixField affine_pullback(const SmoothMatrixField&, const RealMatrix& jacobian,
                                           const Point& offset);

  friend class FieldEvalContext;

private:
  explicit SmoothMatrixField(std::shared_ptr<const detail::FieldNode> node)
      : node_(std::move(node)) {}
  std::shared_ptr<const detail::FieldNode> node_;
};

SmoothMatrixField operator+(const SmoothMatrixField&, const SmoothMatrixField&);
SmoothMatrixField operator-(const SmoothMatrixField&, const SmoothMatrixField&);
SmoothMatrixField operator*(const SmoothMatrixField&, const SmoothMatrixField&);
SmoothMatrixField sum(std::vector<SmoothMatrixField> terms);
SmoothMatrixField adjoint(const SmoothMatrixField&);
SmoothMatrixField transpose(const SmoothMatrixField&);
SmoothMatrixField inverse(const SmoothMatrixField&);
SmoothMatrixField block(const std::vector<std::vector<SmoothMatrixField>>& grid);
SmoothMatrixField slice(const SmoothMatrixField&, int row0, int col0, int rows, int cols);
SmoothMatrixField scale(Complex c, const SmoothMatrixField&);
SmoothMatrixField smul(const SmoothMatrixField& scalar, const SmoothMatrixField&);
SmoothMatrixField partial(int k, const SmoothMatrixField&);
SmoothMatrixField trace(const SmoothMatrixField&);
SmoothMatrixField affine_pullback(const SmoothMatrixField&, const RealMatrix& jacobian,
                                  const Point& offset);

/// Shared evaluation cache for one point. Fields are immutable and share
/// subtrees; evaluating several fields through one context computes each
/// shared node once (at the highest order requested so far).
class FieldEvalContext {
public:
  explicit FieldEvalContext(Point x) : x_(std::move(x)) {}

  const Point& point() const noexcept { return x_; }

  /// Reference into the cache; stays valid for the context's lifetime.
  /// Entries may be upgraded in place to a higher order, which preserves
  /// all lower-order slots.
  const MatrixJet& eval(const SmoothMatrixField& f, int order);

private:
  friend struct detail::FieldNode;
  const MatrixJet& eval_node(const detail::FieldNode* node, int order);

  Point x_;
  std::unordered_map<const detail::FieldNode*, MatrixJet> cache_;
};

}  // namespace gaugekit

#endif
