#include "gaugekit/jet.hpp"

#include <cmath>

namespace gaugekit {

namespace {

void check_order(int order) {
  if (order < 0 || order > kMaxJetOrder)
    throw EvalError("jet: order exceeds configured maximum (" +
                    std::to_string(kMaxJetOrder) + ")");
}

void check_pair(int na, int nb, int oa, int ob, int order) {
  if (na != nb) throw ShapeError("jet: dimension mismatch");
  if (order > oa || order > ob) throw EvalError("jet: operand order too low");
}

}  // namespace

// ---------------------------------------------------------------------------
// ScalarJet
// ---------------------------------------------------------------------------

ScalarJet::ScalarJet(int dimension, int ord) : n(dimension), order(ord) {
  check_order(ord);
  JetLayout ly(dimension);
  if (order >= 1) d1.assign(ly.count(1), Complex(0, 0));
  if (order >= 2) d2.assign(ly.count(2), Complex(0, 0));
  if (order >= 3) d3.assign(ly.count(3), Complex(0, 0));
}

ScalarJet ScalarJet::constant(int dimension, int ord, Complex c) {
  ScalarJet j(dimension, ord);
  j.value = c;
  return j;
}

ScalarJet ScalarJet::coordinate(int dimension, int ord, int k, double xk) {
  ScalarJet j(dimension, ord);
  j.value = Complex(xk, 0.0);
  if (ord >= 1) j.d1[k] = Complex(1.0, 0.0);
  return j;
}

ScalarJet operator+(const ScalarJet& a, const ScalarJet& b) {
  int order = std::min(a.order, b.order);
  check_pair(a.n, b.n, a.order, b.order, order);
  ScalarJet r(a.n, order);
  r.value = a.value + b.value;
  for (std::size_t i = 0; i < r.d1.size(); ++i) r.d1[i] = a.d1[i] + b.d1[i];
  for (std::size_t i = 0; i < r.d2.size(); ++i) r.d2[i] = a.d2[i] + b.d2[i];
  for (std::size_t i = 0; i < r.d3.size(); ++i) r.d3[i] = a.d3[i] + b.d3[i];
  return r;
}

ScalarJet operator-(const ScalarJet& a, const ScalarJet& b) {
  int order = std::min(a.order, b.order);
  check_pair(a.n, b.n, a.order, b.order, order);
  ScalarJet r(a.n, order);
  r.value = a.value - b.value;
  for (std::size_t i = 0; i < r.d1.size(); ++i) r.d1[i] = a.d1[i] - b.d1[i];
  for (std::size_t i = 0; i < r.d2.size(); ++i) r.d2[i] = a.d2[i] - b.d2[i];
  for (std::size_t i = 0; i < r.d3.size(); ++i) r.d3[i] = a.d3[i] - b.d3[i];
  return r;
}

ScalarJet operator-(const ScalarJet& a) { return scale(Complex(-1, 0), a); }

ScalarJet scale(Complex c, const ScalarJet& a) {
  ScalarJet r(a.n, a.order);
  r.value = c * a.value;
  for (std::size_t i = 0; i < r.d1.size(); ++i) r.d1[i] = c * a.d1[i];
  for (std::size_t i = 0; i < r.d2.size(); ++i) r.d2[i] = c * a.d2[i];
  for (std::size_t i = 0; i < r.d3.size(); ++i) r.d3[i] = c * a.d3[i];
  return r;
}

ScalarJet operator*(const ScalarJet& a, const ScalarJet& b) {
  int order = std::min(a.order, b.order);
  check_pair(a.n, b.n, a.order, b.order, order);
  JetLayout ly(a.n);
  ScalarJet r(a.n, order);
  r.value = a.value * b.value;
  if (order >= 1)
    for (int k = 0; k < a.n; ++k) r.d1[k] = a.d1[k] * b.value + a.value * b.d1[k];
  if (order >= 2)
    for (int l = 0; l < a.n; ++l)
      for (int k = 0; k <= l; ++k)
        r.d2[ly.idx2(k, l)] = a.d2[ly.idx2(k, l)] * b.value + a.d1[k] * b.d1[l] +
                              a.d1[l] * b.d1[k] + a.value * b.d2[ly.idx2(k, l)];
  if (order >= 3)
    for (int m = 0; m < a.n; ++m)
      for (int l = 0; l <= m; ++l)
        for (int k = 0; k <= l; ++k) {
          Complex acc = a.d3[ly.idx3(k, l, m)] * b.value;
          acc += a.d2[ly.idx2(k, l)] * b.d1[m];
          acc += a.d2[ly.idx2(k, m)] * b.d1[l];
          acc += a.d2[ly.idx2(l, m)] * b.d1[k];
          acc += a.d1[k] * b.d2[ly.idx2(l, m)];
          acc += a.d1[l] * b.d2[ly.idx2(k, m)];
          acc += a.d1[m] * b.d2[ly.idx2(k, l)];
          acc += a.value * b.d3[ly.idx3(k, l, m)];
          r.d3[ly.idx3(k, l, m)] = acc;
        }
  return r;
}

ScalarJet reciprocal(const ScalarJet& a) {
  if (std::abs(a.value) == 0.0)
    throw EvalError("jet: division by zero at evaluation point");
  JetLayout ly(a.n);
  ScalarJet w(a.n, a.order);
  w.value = Complex(1, 0) / a.value;
  // Leibniz recurrence from a * w = 1.
  if (a.order >= 1)
    for (int k = 0; k < a.n; ++k) w.d1[k] = -w.value * a.d1[k] * w.value;
  if (a.order >= 2)
    for (int l = 0; l < a.n; ++l)
      for (int k = 0; k <= l; ++k)
        w.d2[ly.idx2(k, l)] =
            -w.value * (a.d2[ly.idx2(k, l)] * w.value + a.d1[k] * w.d1[l] + a.d1[l] * w.d1[k]);
  if (a.order >= 3)
    for (int m = 0; m < a.n; ++m)
      for (int l = 0; l <= m; ++l)
        for (int k = 0; k <= l; ++k) {
          Complex acc = a.d3[ly.idx3(k, l, m)] * w.value;
          acc += a.d2[ly.idx2(k, l)] * w.d1[m];
          acc += a.d2[ly.idx2(k, m)] * w.d1[l];
          acc += a.d2[ly.idx2(l, m)] * w.d1[k];
          acc += a.d1[k] * w.d2[ly.idx2(l, m)];
          acc += a.d1[l] * w.d2[ly.idx2(k, m)];
          acc += a.d1[m] * w.d2[ly.idx2(k, l)];
          w.d3[ly.idx3(k, l, m)] = -w.value * acc;
        }
  return w;
}

ScalarJet operator/(const ScalarJet& a, const ScalarJet& b) { return a * reciprocal(b); }

namespace {

// Chain rule for f(u) given f and its first three derivatives at u.value.
ScalarJet compose_unary(const ScalarJet& u, Complex c0, Complex c1, Complex c2, Complex c3) {
  JetLayout ly(u.n);
  ScalarJet r(u.n, u.order);
  r.value = c0;
  if (u.order >= 1)
    for (int k = 0; k < u.n; ++k) r.d1[k] = c1 * u.d1[k];
  if (u.order >= 2)
    for (int l = 0; l < u.n; ++l)
      for (int k = 0; k <= l; ++k)
        r.d2[ly.idx2(k, l)] = c2 * u.d1[k] * u.d1[l] + c1 * u.d2[ly.idx2(k, l)];
  if (u.order >= 3)
    for (int m = 0; m < u.n; ++m)
      for (int l = 0; l <= m; ++l)
        for (int k = 0; k <= l; ++k)
          r.d3[ly.idx3(k, l, m)] =
              c3 * u.d1[k] * u.d1[l] * u.d1[m] +
              c2 * (u.d2[ly.idx2(k, l)] * u.d1[m] + u.d2[ly.idx2(k, m)] * u.d1[l] +
                    u.d2[ly.idx2(l, m)] * u.d1[k]) +
              c1 * u.d3[ly.idx3(k, l, m)];
  return r;
}

}  // namespace

ScalarJet exp(const ScalarJet& a) {
  Complex e = std::exp(a.value);
  return compose_unary(a, e, e, e, e);
}

ScalarJet sin(const ScalarJet& a) {
  Complex s = std::sin(a.value), c = std::cos(a.value);
  return compose_unary(a, s, c, -s, -c);
}

ScalarJet cos(const ScalarJet& a) {
  Complex s = std::sin(a.value), c = std::cos(a.value);
  return compose_unary(a, c, -s, -c, s);
}

ScalarJet pow(const ScalarJet& a, long exponent) {
  if (exponent < 0) return reciprocal(pow(a, -exponent));
  ScalarJet result = ScalarJet::constant(a.n, a.order, Complex(1, 0));
  ScalarJet base = a;
  long e = exponent;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

// ---------------------------------------------------------------------------
// MatrixJet
// ---------------------------------------------------------------------------

MatrixJet::MatrixJet(int dimension, int ord, int rows, int cols)
    : n_(dimension), order_(ord) {
  check_order(ord);
  JetLayout ly(dimension);
  value_ = Matrix::Zero(rows, cols);
  if (order_ >= 1) d1_.assign(ly.count(1), Matrix::Zero(rows, cols));
  if (order_ >= 2) d2_.assign(ly.count(2), Matrix::Zero(rows, cols));
  if (order_ >= 3) d3_.assign(ly.count(3), Matrix::Zero(rows, cols));
}

MatrixJet MatrixJet::constant(int dimension, int ord, const Matrix& value) {
  MatrixJet j(dimension, ord, value.rows(), value.cols());
  j.value_ = value;
  return j;
}

MatrixJet MatrixJet::from_scalar(const ScalarJet& s) {
  MatrixJet j(s.n, s.order, 1, 1);
  j.value_(0, 0) = s.value;
  for (std::size_t i = 0; i < s.d1.size(); ++i) j.d1_[i](0, 0) = s.d1[i];
  for (std::size_t i = 0; i < s.d2.size(); ++i) j.d2_[i](0, 0) = s.d2[i];
  for (std::size_t i = 0; i < s.d3.size(); ++i) j.d3_[i](0, 0) = s.d3[i];
  return j;
}

ScalarJet MatrixJet::entry(int i, int j) const {
  ScalarJet s(n_, order_);
  s.value = value_(i, j);
  for (std::size_t t = 0; t < d1_.size(); ++t) s.d1[t] = d1_[t](i, j);
  for (std::size_t t = 0; t < d2_.size(); ++t) s.d2[t] = d2_[t](i, j);
  for (std::size_t t = 0; t < d3_.size(); ++t) s.d3[t] = d3_[t](i, j);
  return s;
}

void MatrixJet::set_entry(int i, int j, const ScalarJet& s) {
  if (s.n != n_ || s.order < order_) throw EvalError("MatrixJet::set_entry: jet mismatch");
  value_(i, j) = s.value;
  for (std::size_t t = 0; t < d1_.size(); ++t) d1_[t](i, j) = s.d1[t];
  for (std::size_t t = 0; t < d2_.size(); ++t) d2_[t](i, j) = s.d2[t];
  for (std::size_t t = 0; t < d3_.size(); ++t) d3_[t](i, j) = s.d3[t];
}

namespace {

template <class Fn>
void for_each_slot(const MatrixJet& a, int order, Fn&& fn) {
  // fn(alpha) over all stored multi-indices up to `order`, encoded as
  // (level, flat index, representative (k,l,m)).
  const int n = a.dimension();
  fn(0, 0, 0, 0, 0);
  if (order >= 1)
    for (int k = 0; k < n; ++k) fn(1, k, k, 0, 0);
  JetLayout ly(n);
  if (order >= 2)
    for (int l = 0; l < n; ++l)
      for (int k = 0; k <= l; ++k) fn(2, ly.idx2(k, l), k, l, 0);
  if (order >= 3)
    for (int m = 0; m < n; ++m)
      for (int l = 0; l <= m; ++l)
        for (int k = 0; k <= l; ++k) fn(3, ly.idx3(k, l, m), k, l, m);
}

const Matrix& slot(const MatrixJet& a, int level, int k, int l, int m) {
  switch (level) {
    case 0: return a.value();
    case 1: return a.first(k);
    case 2: return a.second(k, l);
    default: return a.third(k, l, m);
  }
}

Matrix& slot(MatrixJet& a, int level, int k, int l, int m) {
  switch (level) {
    case 0: return a.value();
    case 1: return a.first(k);
    case 2: return a.second(k, l);
    default: return a.third(k, l, m);
  }
}

}  // namespace

MatrixJet add(const MatrixJet& a, const MatrixJet& b, int order) {
  check_pair(a.dimension(), b.dimension(), a.order(), b.order(), order);
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("jet add: shape mismatch");
  MatrixJet r(a.dimension(), order, a.rows(), a.cols());
  for_each_slot(r, order, [&](int lev, int, int k, int l, int m) {
    slot(r, lev, k, l, m) = slot(a, lev, k, l, m) + slot(b, lev, k, l, m);
  });
  return r;
}

MatrixJet sub(const MatrixJet& a, const MatrixJet& b, int order) {
  check_pair(a.dimension(), b.dimension(), a.order(), b.order(), order);
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("jet sub: shape mismatch");
  MatrixJet r(a.dimension(), order, a.rows(), a.cols());
  for_each_slot(r, order, [&](int lev, int, int k, int l, int m) {
    slot(r, lev, k, l, m) = slot(a, lev, k, l, m) - slot(b, lev, k, l, m);
  });
  return r;
}

MatrixJet scale(Complex c, const MatrixJet& a, int order) {
  if (order > a.order()) throw EvalError("jet scale: operand order too low");
  MatrixJet r(a.dimension(), order, a.rows(), a.cols());
  for_each_slot(r, order, [&](int lev, int, int k, int l, int m) {
    slot(r, lev, k, l, m) = c * slot(a, lev, k, l, m);
  });
  return r;
}

MatrixJet mul(const MatrixJet& a, const MatrixJet& b, int order) {
  check_pair(a.dimension(), b.dimension(), a.order(), b.order(), order);
  if (a.cols() != b.rows()) throw ShapeError("jet mul: inner dimensions differ");
  const int n = a.dimension();
  MatrixJet r(n, order, a.rows(), b.cols());
  r.value() = a.value() * b.value();
  if (order >= 1)
    for (int k = 0; k < n; ++k)
      r.first(k) = a.first(k) * b.value() + a.value() * b.first(k);
  if (order >= 2)
    for (int l = 0; l < n; ++l)
      for (int k = 0; k <= l; ++k)
        r.second(k, l) = a.second(k, l) * b.value() + a.first(k) * b.first(l) +
                         a.first(l) * b.first(k) + a.value() * b.second(k, l);
  if (order >= 3)
    for (int m = 0; m < n; ++m)
      for (int l = 0; l <= m; ++l)
        for (int k = 0; k <= l; ++k)
          r.third(k, l, m) = a.third(k, l, m) * b.value() + a.second(k, l) * b.first(m) +
                             a.second(k, m) * b.first(l) + a.second(l, m) * b.first(k) +
                             a.first(k) * b.second(l, m) + a.first(l) * b.second(k, m) +
                             a.first(m) * b.second(k, l) + a.value() * b.third(k, l, m);
  return r;
}

MatrixJet scalar_mul(const ScalarJet& s, const MatrixJet& a, int order) {
  check_pair(s.n, a.dimension(), s.order, a.order(), order);
  const int n = a.dimension();
  JetLayout ly(n);
  MatrixJet r(n, order, a.rows(), a.cols());
  r.value() = s.value * a.value();
  if (order >= 1)
    for (int k = 0; k < n; ++k)
      r.first(k) = s.d1[k] * a.value() + s.value * a.first(k);
  if (order >= 2)
    for (int l = 0; l < n; ++l)
      for (int k = 0; k <= l; ++k)
        r.second(k, l) = s.d2[ly.idx2(k, l)] * a.value() + s.d1[k] * a.first(l) +
                         s.d1[l] * a.first(k) + s.value * a.second(k, l);
  if (order >= 3)
    for (int m = 0; m < n; ++m)
      for (int l = 0; l <= m; ++l)
        for (int k = 0; k <= l; ++k)
          r.third(k, l, m) = s.d3[ly.idx3(k, l, m)] * a.value() +
                             s.d2[ly.idx2(k, l)] * a.first(m) +
                             s.d2[ly.idx2(k, m)] * a.first(l) +
                             s.d2[ly.idx2(l, m)] * a.first(k) +
                             s.d1[k] * a.second(l, m) + s.d1[l] * a.second(k, m) +
                             s.d1[m] * a.second(k, l) + s.value * a.third(k, l, m);
  return r;
}

MatrixJet adjoint(const MatrixJet& a, int order) {
  if (order > a.order()) throw EvalError("jet adjoint: operand order too low");
  MatrixJet r(a.dimension(), order, a.cols(), a.rows());
  for_each_slot(r, order, [&](int lev, int, int k, int l, int m) {
    slot(r, lev, k, l, m) = slot(a, lev, k, l, m).adjoint();
  });
  return r;
}

MatrixJet transpose(const MatrixJet& a, int order) {
  if (order > a.order()) throw EvalError("jet transpose: operand order too low");
  MatrixJet r(a.dimension(), order, a.cols(), a.rows());
  for_each_slot(r, order, [&](int lev, int, int k, int l, int m) {
    slot(r, lev, k, l, m) = slot(a, lev, k, l, m).transpose();
  });
  return r;
}

MatrixJet trace(const MatrixJet& a, int order) {
  if (a.rows() != a.cols()) throw ShapeError("jet trace: non-square matrix");
  if (order > a.order()) throw EvalError("jet trace: operand order too low");
  MatrixJet r(a.dimension(), order, 1, 1);
  for_each_slot(r, order, [&](int lev, int, int k, int l, int m) {
    slot(r, lev, k, l, m)(0, 0) = slot(a, lev, k, l, m).trace();
  });
  return r;
}

MatrixJet inverse(const MatrixJet& a, int order) {
  if (a.rows() != a.cols()) throw ShapeError("jet inverse: non-square matrix");
  if (order > a.order()) throw EvalError("jet inverse: operand order too low");
  Eigen::PartialPivLU<Matrix> lu(a.value());
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs().eval();
  const double max_pivot = pivots.maxCoeff();
  if (max_pivot == 0.0 || pivots.minCoeff() <= max_pivot * 1e-15)
    throw EvalError("jet inverse: singular matrix at evaluation point");
  const int n = a.dimension();
  MatrixJet w(n, order, a.rows(), a.cols());
  w.value() = lu.inverse();
  const Matrix& w0 = w.value();
  if (order >= 1)
    for (int k = 0; k < n; ++k) w.first(k) = -w0 * a.first(k) * w0;
  if (order >= 2)
    for (int l = 0; l < n; ++l)
      for (int k = 0; k <= l; ++k)
        w.second(k, l) = -w0 * (a.second(k, l) * w0 + a.first(k) * w.first(l) +
                                a.first(l) * w.first(k));
  if (order >= 3)
    for (int m = 0; m < n; ++m)
      for (int l = 0; l <= m; ++l)
        for (int k = 0; k <= l; ++k)
          w.third(k, l, m) =
              -w0 * (a.third(k, l, m) * w0 + a.second(k, l) * w.first(m) +
                     a.second(k, m) * w.first(l) + a.second(l, m) * w.first(k) +
                     a.first(k) * w.second(l, m) + a.first(l) * w.second(k, m) +
                     a.first(m) * w.second(k, l));
  return w;
}

MatrixJet shift_partial(const MatrixJet& a, int k, int order) {
  if (order + 1 > a.order())
    throw EvalError("jet shift_partial: base jet order too low");
  const int n = a.dimension();
  MatrixJet r(n, order, a.rows(), a.cols());
  r.value() = a.first(k);
  if (order >= 1)
    for (int l = 0; l < n; ++l) r.first(l) = a.second(k, l);
  if (order >= 2)
    for (int m = 0; m < n; ++m)
      for (int l = 0; l <= m; ++l) r.second(l, m) = a.third(k, l, m);
  return r;
}

MatrixJet block(const std::vector<std::vector<MatrixJet>>& grid, int order) {
  if (grid.empty() || grid.front().empty()) throw ShapeError("jet block: empty grid");
  const int n = grid[0][0].dimension();
  int total_rows = 0, total_cols = 0;
  for (const auto& row : grid) total_rows += row.front().rows();
  for (const auto& cell : grid.front()) total_cols += cell.cols();
  MatrixJet r(n, order, total_rows, total_cols);
  int row0 = 0;
  for (const auto& row : grid) {
    const int rh = row.front().rows();
    int col0 = 0;
    for (const auto& cell : row) {
      if (cell.rows() != rh) throw ShapeError("jet block: ragged row heights");
      for_each_slot(r, order, [&](int lev, int, int k, int l, int m) {
        slot(r, lev, k, l, m).block(row0, col0, rh, cell.cols()) = slot(cell, lev, k, l, m);
      });
      col0 += cell.cols();
    }
    if (col0 != total_cols) throw ShapeError("jet block: ragged column widths");
    row0 += rh;
  }
  return r;
}

MatrixJet slice(const MatrixJet& a, int row0, int col0, int rows, int cols, int order) {
  if (row0 < 0 || col0 < 0 || row0 + rows > a.rows() || col0 + cols > a.cols())
    throw ShapeError("jet slice: block out of range");
  MatrixJet r(a.dimension(), order, rows, cols);
  for_each_slot(r, order, [&](int lev, int, int k, int l, int m) {
    slot(r, lev, k, l, m) = slot(a, lev, k, l, m).block(row0, col0, rows, cols);
  });
  return r;
}

MatrixJet affine_pullback(const MatrixJet& at_x, const RealMatrix& jacobian, int order) {
  const int n = static_cast<int>(jacobian.rows());
  const int m = static_cast<int>(jacobian.cols());
  if (at_x.dimension() != n) throw ShapeError("jet affine_pullback: dimension mismatch");
  if (order > at_x.order()) throw EvalError("jet affine_pullback: operand order too low");
  MatrixJet r(m, order, at_x.rows(), at_x.cols());
  r.value() = at_x.value();
  if (order >= 1)
    for (int j = 0; j < m; ++j) {
      Matrix acc = Matrix::Zero(at_x.rows(), at_x.cols());
      for (int k = 0; k < n; ++k)
        if (jacobian(k, j) != 0.0) acc += jacobian(k, j) * at_x.first(k);
      r.first(j) = acc;
    }
  if (order >= 2)
    for (int j2 = 0; j2 < m; ++j2)
      for (int j1 = 0; j1 <= j2; ++j1) {
        Matrix acc = Matrix::Zero(at_x.rows(), at_x.cols());
        for (int k1 = 0; k1 < n; ++k1)
          for (int k2 = 0; k2 < n; ++k2) {
            double c = jacobian(k1, j1) * jacobian(k2, j2);
            if (c != 0.0) acc += c * at_x.second(k1, k2);
          }
        r.second(j1, j2) = acc;
      }
  if (order >= 3)
    for (int j3 = 0; j3 < m; ++j3)
      for (int j2 = 0; j2 <= j3; ++j2)
        for (int j1 = 0; j1 <= j2; ++j1) {
          Matrix acc = Matrix::Zero(at_x.rows(), at_x.cols());
          for (int k1 = 0; k1 < n; ++k1)
            for (int k2 = 0; k2 < n; ++k2)
              for (int k3 = 0; k3 < n; ++k3) {
                double c = jacobian(k1, j1) * jacobian(k2, j2) * jacobian(k3, j3);
                if (c != 0.0) acc += c * at_x.third(k1, k2, k3);
              }
          r.third(j1, j2, j3) = acc;
        }
  return r;
}

}  // namespace gaugekit
