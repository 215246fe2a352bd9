#ifndef GAUGEKIT_FORMS_HPP
#define GAUGEKIT_FORMS_HPP

#include <map>
#include <vector>

#include "gaugekit/field.hpp"

namespace gaugekit {

/// Strictly increasing tuple of zero-based coordinate indices; the empty
/// tuple indexes the degree-0 component.
using IndexTuple = std::vector<int>;

/// Merge two strictly increasing disjoint tuples into `out` and return the
/// sign of the interleaving permutation; returns 0 when the tuples share
/// an index.
int merge_sign(const IndexTuple& a, const IndexTuple& b, IndexTuple& out);

bool tuple_valid(const IndexTuple& t, int dimension);

/// Coefficient algebra used by GradedForm, specialized for pointwise
/// matrices and for lazy matrix fields.
template <class C>
struct CoeffOps;

template <>
struct CoeffOps<Matrix> {
  static Matrix add(const Matrix& a, const Matrix& b) { return a + b; }
  static Matrix mul(const Matrix& a, const Matrix& b) { return a * b; }
  static Matrix scale(Complex c, const Matrix& a) { return c * a; }
  static Matrix trace(const Matrix& a) {
    Matrix t(1, 1);
    t(0, 0) = a.trace();
    return t;
  }
  static Matrix identity(int size) { return Matrix::Identity(size, size); }
  static int rows(const Matrix& a) { return static_cast<int>(a.rows()); }
  static int cols(const Matrix& a) { return static_cast<int>(a.cols()); }
};

template <>
struct CoeffOps<SmoothMatrixField> {
  static SmoothMatrixField add(const SmoothMatrixField& a, const SmoothMatrixField& b) {
    return a + b;
  }
  static SmoothMatrixField mul(const SmoothMatrixField& a, const SmoothMatrixField& b) {
    return a * b;
  }
  static SmoothMatrixField scale(Complex c, const SmoothMatrixField& a) {
    return gaugekit::scale(c, a);
  }
  static SmoothMatrixField trace(const SmoothMatrixField& a) { return gaugekit::trace(a); }
  static SmoothMatrixField identity(int size) { return SmoothMatrixField::identity(size); }
  static int rows(const SmoothMatrixField& a) { return a.rows(); }
  static int cols(const SmoothMatrixField& a) { return a.cols(); }
};

/// A graded sum of differential forms with coefficients of type C, stored
/// sparsely per degree by strictly increasing index tuples. Absent tuples
/// are zero; degrees above the chart dimension cannot be stored.
template <class C>
class GradedForm {
public:
  using ComponentMap = std::map<IndexTuple, C>;

  GradedForm(int dimension, int rows, int cols)
      : n_(dimension), rows_(rows), cols_(cols), comps_(dimension + 1) {
    if (dimension < 1) throw ShapeError("GradedForm: dimension must be >= 1");
  }

  int dimension() const noexcept { return n_; }
  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }

  const ComponentMap& component(int degree) const { return comps_.at(degree); }

  bool empty() const {
    for (const auto& m : comps_)
      if (!m.empty()) return false;
    return true;
  }

  std::vector<int> degrees() const {
    std::vector<int> out;
    for (int p = 0; p <= n_; ++p)
      if (!comps_[p].empty()) out.push_back(p);
    return out;
  }

  void set(const IndexTuple& idx, C value) {
    check_tuple(idx);
    check_shape(value);
    comps_[idx.size()][idx] = std::move(value);
  }

  void accumulate(const IndexTuple& idx, const C& value) {
    check_tuple(idx);
    check_shape(value);
    auto& m = comps_[idx.size()];
    auto it = m.find(idx);
    if (it == m.end())
      m.emplace(idx, value);
    else
      it->second = CoeffOps<C>::add(it->second, value);
  }

  /// fn(degree, tuple, coefficient) over every stored component.
  template <class Fn>
  void for_each(Fn&& fn) const {
    for (int p = 0; p <= n_; ++p)
      for (const auto& [idx, value] : comps_[p]) fn(p, idx, value);
  }

private:
  void check_tuple(const IndexTuple& idx) const {
    if (!tuple_valid(idx, n_)) throw ShapeError("GradedForm: bad index tuple");
  }
  void check_shape(const C& value) const {
    if (CoeffOps<C>::rows(value) != rows_ || CoeffOps<C>::cols(value) != cols_)
      throw ShapeError("GradedForm: coefficient shape mismatch");
  }

  int n_, rows_, cols_;
  std::vector<ComponentMap> comps_;
};

/// Pointwise values of a graded form at one point.
using PolyForm = GradedForm<Matrix>;
/// A graded form whose coefficients are still fields.
using FieldForm = GradedForm<SmoothMatrixField>;

template <class C>
GradedForm<C> add(const GradedForm<C>& a, const GradedForm<C>& b) {
  if (a.dimension() != b.dimension() || a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeError("form add: shape mismatch");
  GradedForm<C> out = a;
  b.for_each([&](int, const IndexTuple& idx, const C& v) { out.accumulate(idx, v); });
  return out;
}

template <class C>
GradedForm<C> scale(Complex c, const GradedForm<C>& a) {
  GradedForm<C> out(a.dimension(), a.rows(), a.cols());
  a.for_each([&](int, const IndexTuple& idx, const C& v) {
    out.set(idx, CoeffOps<C>::scale(c, v));
  });
  return out;
}

template <class C>
GradedForm<C> sub(const GradedForm<C>& a, const GradedForm<C>& b) {
  return add(a, scale(Complex(-1, 0), b));
}

/// Wedge product; coefficients multiply as matrices, index tuples merge
/// with the interleaving sign, coinciding indices drop out.
template <class C>
GradedForm<C> wedge(const GradedForm<C>& a, const GradedForm<C>& b) {
  if (a.dimension() != b.dimension()) throw ShapeError("wedge: dimension mismatch");
  if (a.cols() != b.rows()) throw ShapeError("wedge: coefficient shapes not composable");
  GradedForm<C> out(a.dimension(), a.rows(), b.cols());
  IndexTuple merged;
  a.for_each([&](int p, const IndexTuple& I, const C& av) {
    b.for_each([&](int q, const IndexTuple& J, const C& bv) {
      if (p + q > out.dimension()) return;
      const int sign = merge_sign(I, J, merged);
      if (sign == 0) return;
      C term = CoeffOps<C>::mul(av, bv);
      if (sign < 0) term = CoeffOps<C>::scale(Complex(-1, 0), term);
      out.accumulate(merged, term);
    });
  });
  return out;
}

/// Entrywise trace per tuple; the result is scalar (1x1) valued.
template <class C>
GradedForm<C> trace(const GradedForm<C>& a) {
  if (a.rows() != a.cols()) throw ShapeError("form trace: non-square coefficients");
  GradedForm<C> out(a.dimension(), 1, 1);
  a.for_each([&](int, const IndexTuple& idx, const C& v) {
    out.set(idx, CoeffOps<C>::trace(v));
  });
  return out;
}

/// exp of a form with only even-degree components of degree >= 2: the
/// identity in degree 0 plus wedge powers w^k / k!. The series terminates
/// once 2k exceeds the chart dimension, so the sum is exact.
template <class C>
GradedForm<C> exp_truncated(const GradedForm<C>& w) {
  if (w.rows() != w.cols()) throw ShapeError("exp_truncated: non-square coefficients");
  for (int p : w.degrees())
    if (p % 2 != 0 || p < 2)
      throw ShapeError("exp_truncated: form must have even degrees >= 2 only");
  GradedForm<C> out(w.dimension(), w.rows(), w.cols());
  out.set(IndexTuple{}, CoeffOps<C>::identity(w.rows()));
  if (w.empty()) return out;
  GradedForm<C> power = w;
  double factorial = 1.0;
  for (int k = 1; 2 * k <= w.dimension(); ++k) {
    factorial *= k;
    GradedForm<C> term = scale(Complex(1.0 / factorial, 0.0), power);
    out = add(out, term);
    if (2 * (k + 1) > w.dimension()) break;
    power = wedge(power, w);
    if (power.empty()) break;
  }
  return out;
}

// --- pointwise helpers ------------------------------------------------------

/// The components of one degree, as a standalone form.
PolyForm restrict_degree(const PolyForm& w, int degree);

/// Max entrywise absolute value across all components.
double norm_inf(const PolyForm& w);
/// Same restricted to one degree.
double norm_inf(const PolyForm& w, int degree);
/// Max over positive degrees only.
double norm_inf_positive(const PolyForm& w);

/// Evaluate every coefficient of a field form at x (shared cache) and
/// collect the pointwise values.
PolyForm eval_form(const FieldForm& w, const Point& x);
PolyForm eval_form(const FieldForm& w, FieldEvalContext& ctx);

/// Pointwise exterior derivative of a field form at x, using order-1 jets
/// of the coefficients.
PolyForm exterior_derivative(const FieldForm& w, const Point& x);
PolyForm exterior_derivative(const FieldForm& w, FieldEvalContext& ctx);

/// Lazy exterior derivative: coefficients become sums of partial() nodes.
FieldForm exterior_derivative_field(const FieldForm& w);

/// Pull back pointwise values through an affine map with the given
/// Jacobian dx/dy: tuples contract with minors of the Jacobian.
PolyForm pullback_values(const PolyForm& at_x, const RealMatrix& jacobian);

// --- the degree-homogeneous spec type ---------------------------------------

/// A degree-p differential form with SmoothMatrixField coefficients.
class FormField {
public:
  FormField(int dimension, int degree, int rows, int cols)
      : degree_(degree), form_(dimension, rows, cols) {
    if (degree < 0 || degree > dimension) throw ShapeError("FormField: bad degree");
  }

  /// Wrap a graded field form that is concentrated in one degree.
  static FormField from_graded(const FieldForm& w);

  int dimension() const { return form_.dimension(); }
  int degree() const noexcept { return degree_; }
  int rows() const { return form_.rows(); }
  int cols() const { return form_.cols(); }

  void set(const IndexTuple& idx, SmoothMatrixField f) {
    if (static_cast<int>(idx.size()) != degree_)
      throw ShapeError("FormField::set: tuple length must equal the degree");
    form_.set(idx, std::move(f));
  }

  const FieldForm& graded() const noexcept { return form_; }

  PolyForm eval(const Point& x) const { return eval_form(form_, x); }

private:
  int degree_;
  FieldForm form_;
};

inline PolyForm exterior_derivative(const FormField& w, const Point& x) {
  return exterior_derivative(w.graded(), x);
}

inline FormField exterior_derivative_field(const FormField& w) {
  return FormField::from_graded(exterior_derivative_field(w.graded()));
}

FormField wedge(const FormField& a, const FormField& b);

}  // namespace gaugekit

#endif
