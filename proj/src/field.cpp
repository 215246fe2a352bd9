#include "gaugekit/field.hpp"

#include <sstream>

namespace gaugekit {

namespace detail {

enum class FieldKind {
  Constant,
  ExprGrid,
  Sum,
  Product,
  Adjoint,
  Transpose,
  Inverse,
  Block,
  Slice,
  ScaleConst,
  ScalarProduct,
  Partial,
  Trace,
  AffinePullback,
};

struct FieldNode {
  FieldKind kind;
  int rows = 0, cols = 0;

  Matrix constant;                                        // Constant
  std::vector<Expr> exprs;                                // ExprGrid, row-major
  std::vector<std::shared_ptr<const FieldNode>> children; // operands; Block row-major
  int grid_rows = 0, grid_cols = 0;                       // Block layout
  int row0 = 0, col0 = 0;                                 // Slice offsets
  int direction = 0;                                      // Partial coordinate
  Complex scalar{0, 0};                                   // ScaleConst
  RealMatrix jacobian;                                    // AffinePullback
  Point offset;                                           // AffinePullback
};

namespace {

using NodePtr = std::shared_ptr<const FieldNode>;

std::shared_ptr<FieldNode> make(FieldKind kind, int rows, int cols) {
  auto node = std::make_shared<FieldNode>();
  node->kind = kind;
  node->rows = rows;
  node->cols = cols;
  return node;
}

std::string point_string(const Point& x) {
  std::ostringstream os;
  os << "(";
  for (int k = 0; k < x.size(); ++k) os << (k ? ", " : "") << x[k];
  os << ")";
  return os.str();
}

}  // namespace
}  // namespace detail

using detail::FieldKind;
using detail::FieldNode;

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

SmoothMatrixField SmoothMatrixField::constant(const Matrix& value) {
  auto node = detail::make(FieldKind::Constant, static_cast<int>(value.rows()),
                           static_cast<int>(value.cols()));
  node->constant = value;
  return SmoothMatrixField(std::move(node));
}

SmoothMatrixField SmoothMatrixField::identity(int size) {
  return constant(Matrix::Identity(size, size));
}

SmoothMatrixField SmoothMatrixField::zero(int rows, int cols) {
  return constant(Matrix::Zero(rows, cols));
}

SmoothMatrixField SmoothMatrixField::from_expr(const Expr& e) {
  return from_grid(1, 1, {e});
}

SmoothMatrixField SmoothMatrixField::from_grid(int rows, int cols, std::vector<Expr> entries) {
  if (rows < 1 || cols < 1 || static_cast<int>(entries.size()) != rows * cols)
    throw ShapeError("SmoothMatrixField::from_grid: entry count does not match shape");
  auto node = detail::make(FieldKind::ExprGrid, rows, cols);
  node->exprs = std::move(entries);
  return SmoothMatrixField(std::move(node));
}

int SmoothMatrixField::rows() const {
  if (!node_) throw ShapeError("SmoothMatrixField: empty field");
  return node_->rows;
}

int SmoothMatrixField::cols() const {
  if (!node_) throw ShapeError("SmoothMatrixField: empty field");
  return node_->cols;
}

SmoothMatrixField operator+(const SmoothMatrixField& a, const SmoothMatrixField& b) {
  return sum({a, b});
}

SmoothMatrixField operator-(const SmoothMatrixField& a, const SmoothMatrixField& b) {
  return sum({a, scale(Complex(-1, 0), b)});
}

SmoothMatrixField sum(std::vector<SmoothMatrixField> terms) {
  if (terms.empty()) throw ShapeError("sum: no terms");
  const int r = terms.front().rows(), c = terms.front().cols();
  auto node = detail::make(FieldKind::Sum, r, c);
  for (const auto& t : terms) {
    if (t.rows() != r || t.cols() != c) throw ShapeError("sum: shape mismatch");
    node->children.push_back(t.node_);
  }
  return SmoothMatrixField(std::move(node));
}

SmoothMatrixField operator*(const SmoothMatrixField& a, const SmoothMatrixField& b) {
  if (a.cols() != b.rows()) throw ShapeError("field product: inner dimensions differ");
  auto node = detail::make(FieldKind::Product, a.rows(), b.cols());
  node->children = {a.node_, b.node_};
  return SmoothMatrixField(std::move(node));
}

SmoothMatrixField adjoint(const SmoothMatrixField& f) {
  auto node = detail::make(FieldKind::Adjoint, f.cols(), f.rows());
  node->children = {f.node_};
  return SmoothMatrixField(std::move(node));
}

SmoothMatrixField transpose(const SmoothMatrixField& f) {
  auto node = detail::make(FieldKind::Transpose, f.cols(), f.rows());
  node->children = {f.node_};
  return SmoothMatrixField(std::move(node));
}

SmoothMatrixField inverse(const SmoothMatrixField& f) {
  if (f.rows() != f.cols()) throw ShapeError("inverse: field is not square");
  auto node = detail::make(FieldKind::Inverse, f.rows(), f.cols());
  node->children = {f.node_};
  return SmoothMatrixField(std::move(node));
}

SmoothMatrixField block(const std::vector<std::vector<SmoothMatrixField>>& grid) {
  if (grid.empty() || grid.front().empty()) throw ShapeError("block: empty grid");
  const int gr = static_cast<int>(grid.size());
  const int gc = static_cast<int>(grid.front().size());
  int total_rows = 0, total_cols = 0;
  for (const auto& cell : grid.front()) total_cols += cell.cols();
  for (const auto& row : grid) {
    if (static_cast<int>(row.size()) != gc) throw ShapeError("block: ragged grid");
    const int rh = row.front().rows();
    int width = 0;
    for (const auto& cell : row) {
      if (cell.rows() != rh) throw ShapeError("block: inconsistent row heights");
      width += cell.cols();
    }
    if (width != total_cols) throw ShapeError("block: inconsistent column widths");
    total_rows += rh;
  }
  for (int j = 0; j < gc; ++j) {
    const int cw = grid.front()[j].cols();
    for (const auto& row : grid)
      if (row[j].cols() != cw) throw ShapeError("block: inconsistent column widths");
  }
  auto node = detail::make(FieldKind::Block, total_rows, total_cols);
  node->grid_rows = gr;
  node->grid_cols = gc;
  for (const auto& row : grid)
    for (const auto& cell : row) node->children.push_back(cell.node_);
  return SmoothMatrixField(std::move(node));
}

SmoothMatrixField slice(const SmoothMatrixField& f, int row0, int col0, int rows, int cols) {
  if (row0 < 0 || col0 < 0 || rows < 1 || cols < 1 || row0 + rows > f.rows() ||
      col0 + cols > f.cols())
    throw ShapeError("slice: block out of range");
  auto node = detail::make(FieldKind::Slice, rows, cols);
  node->children = {f.node_};
  node->row0 = row0;
  node->col0 = col0;
  return SmoothMatrixField(std::move(node));
}

SmoothMatrixField scale(Complex c, const SmoothMatrixField& f) {
  auto node = detail::make(FieldKind::ScaleConst, f.rows(), f.cols());
  node->children = {f.node_};
  node->scalar = c;
  return SmoothMatrixField(std::move(node));
}

SmoothMatrixField smul(const SmoothMatrixField& scalar, const SmoothMatrixField& f) {
  if (scalar.rows() != 1 || scalar.cols() != 1)
    throw ShapeError("smul: scalar operand must be a 1x1 field");
  auto node = detail::make(FieldKind::ScalarProduct, f.rows(), f.cols());
  node->children = {scalar.node_, f.node_};
  return SmoothMatrixField(std::move(node));
}

SmoothMatrixField partial(int k, const SmoothMatrixField& f) {
  if (k < 0) throw ShapeError("partial: negative coordinate index");
  auto node = detail::make(FieldKind::Partial, f.rows(), f.cols());
  node->children = {f.node_};
  node->direction = k;
  return SmoothMatrixField(std::move(node));
}

SmoothMatrixField trace(const SmoothMatrixField& f) {
  if (f.rows() != f.cols()) throw ShapeError("trace: field is not square");
  auto node = detail::make(FieldKind::Trace, 1, 1);
  node->children = {f.node_};
  return SmoothMatrixField(std::move(node));
}

SmoothMatrixField affine_pullback(const SmoothMatrixField& f, const RealMatrix& jacobian,
                                  const Point& offset) {
  if (jacobian.rows() != offset.size())
    throw ShapeError("affine_pullback: jacobian rows must match offset size");
  auto node = detail::make(FieldKind::AffinePullback, f.rows(), f.cols());
  node->children = {f.node_};
  node->jacobian = jacobian;
  node->offset = offset;
  return SmoothMatrixField(std::move(node));
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

const MatrixJet& FieldEvalContext::eval(const SmoothMatrixField& f, int order) {
  if (!f.node_) throw ShapeError("SmoothMatrixField: empty field");
  return eval_node(f.node_.get(), order);
}

const MatrixJet& FieldEvalContext::eval_node(const FieldNode* node, int order) {
  if (order < 0 || order > kMaxJetOrder)
    throw EvalError("eval_jet: order exceeds configured maximum (" +
                    std::to_string(kMaxJetOrder) + ")");
  auto it = cache_.find(node);
  if (it != cache_.end() && it->second.order() >= order) return it->second;

  const int n = static_cast<int>(x_.size());
  MatrixJet result;
  switch (node->kind) {
    case FieldKind::Constant:
      result = MatrixJet::constant(n, order, node->constant);
      break;
    case FieldKind::ExprGrid: {
      result = MatrixJet(n, order, node->rows, node->cols);
      for (int i = 0; i < node->rows; ++i)
        for (int j = 0; j < node->cols; ++j)
          result.set_entry(i, j, node->exprs[i * node->cols + j].eval(x_, order));
      break;
    }
    case FieldKind::Sum: {
      result = eval_node(node->children.front().get(), order);
      for (std::size_t t = 1; t < node->children.size(); ++t)
        result = add(result, eval_node(node->children[t].get(), order), order);
      break;
    }
    case FieldKind::Product: {
      const MatrixJet& a = eval_node(node->children[0].get(), order);
      const MatrixJet& b = eval_node(node->children[1].get(), order);
      result = mul(a, b, order);
      break;
    }
    case FieldKind::Adjoint:
      result = adjoint(eval_node(node->children[0].get(), order), order);
      break;
    case FieldKind::Transpose:
      result = transpose(eval_node(node->children[0].get(), order), order);
      break;
    case FieldKind::Inverse: {
      const MatrixJet& a = eval_node(node->children[0].get(), order);
      try {
        result = inverse(a, order);
      } catch (const EvalError&) {
        throw EvalError("eval_jet: singular matrix at an inverse node, x = " +
                        detail::point_string(x_));
      }
      break;
    }
    case FieldKind::Block: {
      std::vector<std::vector<MatrixJet>> grid(node->grid_rows,
                                               std::vector<MatrixJet>(node->grid_cols));
      for (int i = 0; i < node->grid_rows; ++i)
        for (int j = 0; j < node->grid_cols; ++j)
          grid[i][j] = eval_node(node->children[i * node->grid_cols + j].get(), order);
      result = block(grid, order);
      break;
    }
    case FieldKind::Slice:
      result = slice(eval_node(node->children[0].get(), order), node->row0, node->col0,
                     node->rows, node->cols, order);
      break;
    case FieldKind::ScaleConst:
      result = scale(node->scalar, eval_node(node->children[0].get(), order), order);
      break;
    case FieldKind::ScalarProduct: {
      const MatrixJet& s = eval_node(node->children[0].get(), order);
      const MatrixJet& a = eval_node(node->children[1].get(), order);
      result = scalar_mul(s.entry(0, 0), a, order);
      break;
    }
    case FieldKind::Partial:
      result = shift_partial(eval_node(node->children[0].get(), order + 1), node->direction,
                             order);
      break;
    case FieldKind::Trace:
      result = trace(eval_node(node->children[0].get(), order), order);
      break;
    case FieldKind::AffinePullback: {
      if (node->jacobian.cols() != x_.size())
        throw ShapeError("affine_pullback: point dimension does not match map");
      Point mapped = node->jacobian * x_ + node->offset;
      FieldEvalContext sub(mapped);
      const MatrixJet& at_x = sub.eval_node(node->children[0].get(), order);
      result = affine_pullback(at_x, node->jacobian, order);
      break;
    }
  }
  return cache_[node] = std::move(result);
}

MatrixJet SmoothMatrixField::eval_jet(const Point& x, int order) const {
  FieldEvalContext ctx(x);
  return ctx.eval(*this, order);
}

Matrix SmoothMatrixField::value(const Point& x) const { return eval_jet(x, 0).value(); }

}  // namespace gaugekit
