#ifndef GAUGEKIT_JET_HPP
#define GAUGEKIT_JET_HPP

#include <vector>

#include "gaugekit/chart.hpp"

namespace gaugekit {

/// Hard upper bound on the jet order carried by ScalarJet/MatrixJet.
inline constexpr int kMaxJetOrder = 3;

/// Index bookkeeping for symmetric derivative tensors in n variables.
/// Second-order slots are stored for k <= l, third-order for k <= l <= m,
/// in the combinatorial number system.
struct JetLayout {
  int n = 0;

  explicit JetLayout(int dimension) : n(dimension) {}

  int count(int order) const {
    switch (order) {
      case 0: return 1;
      case 1: return n;
      case 2: return n * (n + 1) / 2;
      case 3: return n * (n + 1) * (n + 2) / 6;
      default: throw EvalError("JetLayout: unsupported order");
    }
  }

  // (k,l) with k <= l after sorting.
  int idx2(int k, int l) const {
    if (k > l) std::swap(k, l);
    return l * (l + 1) / 2 + k;
  }

  // (k,l,m) sorted ascending.
  int idx3(int k, int l, int m) const {
    if (k > l) std::swap(k, l);
    if (l > m) std::swap(l, m);
    if (k > l) std::swap(k, l);
    return m * (m + 1) * (m + 2) / 6 + l * (l + 1) / 2 + k;
  }
};

/// Value and symmetric partial derivatives of a complex scalar at a point,
/// up to order 3. This is the carrier of exact forward-mode differentiation
/// for expression evaluation.
struct ScalarJet {
  int n = 0;
  int order = 0;
  Complex value{0.0, 0.0};
  std::vector<Complex> d1;  // n entries
  std::vector<Complex> d2;  // n(n+1)/2 entries, k <= l
  std::vector<Complex> d3;  // n(n+1)(n+2)/6 entries, k <= l <= m

  ScalarJet() = default;
  ScalarJet(int dimension, int ord);

  static ScalarJet constant(int dimension, int ord, Complex c);
  /// Jet of the coordinate function x^k.
  static ScalarJet coordinate(int dimension, int ord, int k, double xk);

  const Complex& first(int k) const { return d1[k]; }
  const Complex& second(int k, int l) const { return d2[JetLayout(n).idx2(k, l)]; }
  const Complex& third(int k, int l, int m) const { return d3[JetLayout(n).idx3(k, l, m)]; }
};

ScalarJet operator+(const ScalarJet& a, const ScalarJet& b);
ScalarJet operator-(const ScalarJet& a, const ScalarJet& b);
ScalarJet operator*(const ScalarJet& a, const ScalarJet& b);
ScalarJet operator/(const ScalarJet& a, const ScalarJet& b);
ScalarJet operator-(const ScalarJet& a);
ScalarJet scale(Complex c, const ScalarJet& a);
/// 1/a; throws EvalError when |a| vanishes.
ScalarJet reciprocal(const ScalarJet& a);
ScalarJet exp(const ScalarJet& a);
ScalarJet sin(const ScalarJet& a);
ScalarJet cos(const ScalarJet& a);
/// Integer power; negative exponents go through reciprocal().
ScalarJet pow(const ScalarJet& a, long exponent);

/// Jet of a complex matrix-valued function. Same slot layout as ScalarJet
/// with matrices in place of scalars.
class MatrixJet {
public:
  MatrixJet() = default;
  /// All slots zero-initialized to rows x cols matrices.
  MatrixJet(int dimension, int ord, int rows, int cols);

  static MatrixJet constant(int dimension, int ord, const Matrix& value);
  static MatrixJet from_scalar(const ScalarJet& s);

  int dimension() const noexcept { return n_; }
  int order() const noexcept { return order_; }
  int rows() const { return value_.rows(); }
  int cols() const { return value_.cols(); }

  Matrix& value() { return value_; }
  const Matrix& value() const { return value_; }
  Matrix& first(int k) { return d1_[k]; }
  const Matrix& first(int k) const { return d1_[k]; }
  Matrix& second(int k, int l) { return d2_[layout().idx2(k, l)]; }
  const Matrix& second(int k, int l) const { return d2_[layout().idx2(k, l)]; }
  Matrix& third(int k, int l, int m) { return d3_[layout().idx3(k, l, m)]; }
  const Matrix& third(int k, int l, int m) const { return d3_[layout().idx3(k, l, m)]; }

  JetLayout layout() const { return JetLayout(n_); }

  /// Per-entry view: the ScalarJet of entry (i,j).
  ScalarJet entry(int i, int j) const;
  void set_entry(int i, int j, const ScalarJet& s);

private:
  int n_ = 0;
  int order_ = 0;
  Matrix value_;
  std::vector<Matrix> d1_, d2_, d3_;
};

// Arithmetic on matrix jets. `order` selects how many derivative levels of
// the result are filled (must not exceed the operands' orders).
MatrixJet add(const MatrixJet& a, const MatrixJet& b, int order);
MatrixJet sub(const MatrixJet& a, const MatrixJet& b, int order);
MatrixJet mul(const MatrixJet& a, const MatrixJet& b, int order);
MatrixJet scale(Complex c, const MatrixJet& a, int order);
/// Leibniz product of a scalar jet with a matrix jet.
MatrixJet scalar_mul(const ScalarJet& s, const MatrixJet& a, int order);
MatrixJet adjoint(const MatrixJet& a, int order);
MatrixJet transpose(const MatrixJet& a, int order);
MatrixJet trace(const MatrixJet& a, int order);
/// Inverse by LU at order 0 and the Leibniz recurrence above; throws
/// EvalError on a singular value matrix.
MatrixJet inverse(const MatrixJet& a, int order);
/// Jet of the partial derivative field d_k(a); consumes one order of a.
MatrixJet shift_partial(const MatrixJet& a, int k, int order);
/// Assemble a block matrix jet from a dense grid of jets.
MatrixJet block(const std::vector<std::vector<MatrixJet>>& grid, int order);
MatrixJet slice(const MatrixJet& a, int row0, int col0, int rows, int cols, int order);
/// Pull back a jet through the affine map x = J y + b: the argument jet is
/// taken at x with layout J.rows(), the result has layout J.cols().
MatrixJet affine_pullback(const MatrixJet& at_x, const RealMatrix& jacobian, int order);

}  // namespace gaugekit

#endif
