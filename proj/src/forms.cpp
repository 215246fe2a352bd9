#include "gaugekit/forms.hpp"

#include <algorithm>

namespace gaugekit {

int merge_sign(const IndexTuple& a, const IndexTuple& b, IndexTuple& out) {
  out.clear();
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  int sign = 1;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return 0;
    if (a[i] < b[j]) {
      out.push_back(a[i++]);
    } else {
      // b[j] steps over the remaining entries of a.
      if ((a.size() - i) % 2 == 1) sign = -sign;
      out.push_back(b[j++]);
    }
  }
  while (i < a.size()) out.push_back(a[i++]);
  while (j < b.size()) out.push_back(b[j++]);
  return sign;
}

bool tuple_valid(const IndexTuple& t, int dimension) {
  if (static_cast<int>(t.size()) > dimension) return false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < 0 || t[i] >= dimension) return false;
    if (i > 0 && t[i] <= t[i - 1]) return false;
  }
  return true;
}

PolyForm restrict_degree(const PolyForm& w, int degree) {
  PolyForm out(w.dimension(), w.rows(), w.cols());
  for (const auto& [idx, v] : w.component(degree)) out.set(idx, v);
  return out;
}

double norm_inf(const PolyForm& w) {
  double m = 0.0;
  w.for_each([&](int, const IndexTuple&, const Matrix& v) {
    m = std::max(m, v.cwiseAbs().maxCoeff());
  });
  return m;
}

double norm_inf(const PolyForm& w, int degree) {
  double m = 0.0;
  for (const auto& [idx, v] : w.component(degree)) m = std::max(m, v.cwiseAbs().maxCoeff());
  return m;
}

double norm_inf_positive(const PolyForm& w) {
  double m = 0.0;
  w.for_each([&](int p, const IndexTuple&, const Matrix& v) {
    if (p > 0) m = std::max(m, v.cwiseAbs().maxCoeff());
  });
  return m;
}

PolyForm eval_form(const FieldForm& w, FieldEvalContext& ctx) {
  PolyForm out(w.dimension(), w.rows(), w.cols());
  w.for_each([&](int, const IndexTuple& idx, const SmoothMatrixField& f) {
    out.set(idx, ctx.eval(f, 0).value());
  });
  return out;
}

PolyForm eval_form(const FieldForm& w, const Point& x) {
  FieldEvalContext ctx(x);
  return eval_form(w, ctx);
}

PolyForm exterior_derivative(const FieldForm& w, FieldEvalContext& ctx) {
  PolyForm out(w.dimension(), w.rows(), w.cols());
  const int n = w.dimension();
  w.for_each([&](int p, const IndexTuple& idx, const SmoothMatrixField& f) {
    if (p == n) return;  // d of a top-degree form vanishes
    const MatrixJet& jet = ctx.eval(f, 1);
    for (int k = 0; k < n; ++k) {
      if (std::binary_search(idx.begin(), idx.end(), k)) continue;
      IndexTuple extended = idx;
      auto pos = std::lower_bound(extended.begin(), extended.end(), k);
      const int sign = (std::distance(extended.begin(), pos) % 2 == 0) ? 1 : -1;
      extended.insert(pos, k);
      out.accumulate(extended, Complex(sign, 0) * jet.first(k));
    }
  });
  return out;
}

PolyForm exterior_derivative(const FieldForm& w, const Point& x) {
  FieldEvalContext ctx(x);
  return exterior_derivative(w, ctx);
}

FieldForm exterior_derivative_field(const FieldForm& w) {
  FieldForm out(w.dimension(), w.rows(), w.cols());
  const int n = w.dimension();
  w.for_each([&](int p, const IndexTuple& idx, const SmoothMatrixField& f) {
    if (p == n) return;
    for (int k = 0; k < n; ++k) {
      if (std::binary_search(idx.begin(), idx.end(), k)) continue;
      IndexTuple extended = idx;
      auto pos = std::lower_bound(extended.begin(), extended.end(), k);
      const int sign = (std::distance(extended.begin(), pos) % 2 == 0) ? 1 : -1;
      extended.insert(pos, k);
      out.accumulate(extended, scale(Complex(sign, 0), partial(k, f)));
    }
  });
  return out;
}

PolyForm pullback_values(const PolyForm& at_x, const RealMatrix& jacobian) {
  const int n = static_cast<int>(jacobian.rows());
  const int m = static_cast<int>(jacobian.cols());
  if (at_x.dimension() != n) throw ShapeError("pullback_values: dimension mismatch");
  PolyForm out(m, at_x.rows(), at_x.cols());

  // All strictly increasing p-tuples in {0..m-1}.
  auto tuples_of = [](int dim, int p) {
    std::vector<IndexTuple> out_tuples;
    IndexTuple current;
    auto rec = [&](auto&& self, int start) -> void {
      if (static_cast<int>(current.size()) == p) {
        out_tuples.push_back(current);
        return;
      }
      for (int v = start; v < dim; ++v) {
        current.push_back(v);
        self(self, v + 1);
        current.pop_back();
      }
    };
    rec(rec, 0);
    return out_tuples;
  };

  at_x.for_each([&](int p, const IndexTuple& I, const Matrix& v) {
    if (p == 0) {
      out.accumulate(I, v);
      return;
    }
    if (p > m) return;
    for (const IndexTuple& J : tuples_of(m, p)) {
      RealMatrix minor(p, p);
      for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b) minor(a, b) = jacobian(I[a], J[b]);
      const double det = minor.determinant();
      if (det != 0.0) out.accumulate(J, Complex(det, 0) * v);
    }
  });
  return out;
}

FormField FormField::from_graded(const FieldForm& w) {
  std::vector<int> degs = w.degrees();
  if (degs.size() > 1) throw ShapeError("FormField::from_graded: form is not homogeneous");
  const int degree = degs.empty() ? 0 : degs.front();
  FormField out(w.dimension(), degree, w.rows(), w.cols());
  w.for_each([&](int, const IndexTuple& idx, const SmoothMatrixField& f) {
    out.set(idx, f);
  });
  return out;
}

FormField wedge(const FormField& a, const FormField& b) {
  return FormField::from_graded(wedge(a.graded(), b.graded()));
}

}  // namespace gaugekit
