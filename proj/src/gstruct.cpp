#include "gaugekit/gstruct.hpp"

#include <Eigen/SVD>

namespace gaugekit {

// ---------------------------------------------------------------------------
// BilinearStructure
// ---------------------------------------------------------------------------

BilinearStructure BilinearStructure::make(PairingKind kind, Matrix phi) {
  if (phi.rows() != phi.cols()) throw ShapeError("BilinearStructure: phi must be square");
  const double sign = kind == PairingKind::symmetric ? 1.0 : -1.0;
  if ((phi.transpose() - sign * phi).cwiseAbs().maxCoeff() > 1e-12)
    throw ShapeError("BilinearStructure: phi does not have the declared symmetry");
  // make the symmetry exact
  phi = 0.5 * (phi + sign * phi.transpose());
  if (std::abs(phi.determinant()) <= 1e-10)
    throw ShapeError("BilinearStructure: phi is degenerate");
  SmoothMatrixField field = SmoothMatrixField::constant(phi);
  return BilinearStructure(kind, true, std::move(phi), std::move(field));
}

BilinearStructure BilinearStructure::make_field(PairingKind kind, SmoothMatrixField phi) {
  if (phi.rows() != phi.cols()) throw ShapeError("BilinearStructure: phi must be square");
  return BilinearStructure(kind, false, Matrix(), std::move(phi));
}

const Matrix& BilinearStructure::matrix() const {
  if (!constant_) throw ShapeError("BilinearStructure: not a constant form");
  return value_;
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

ParallelReport check_parallel(const Connection& c, const BilinearStructure& s,
                              std::span<const Point> samples) {
  if (s.size() != c.rank()) throw ShapeError("check_parallel: structure size mismatch");
  ParallelReport report;
  report.sample_count = static_cast<int>(samples.size());
  for (const Point& x : samples) {
    FieldEvalContext ctx(x);
    const int order = s.is_constant() ? 0 : 1;
    const MatrixJet phi = ctx.eval(s.field(), order);
    for (int k = 0; k < c.dimension(); ++k) {
      const MatrixJet& a = ctx.eval(c.coeff(k), 0);
      Matrix condition = a.value().transpose() * phi.value() + phi.value() * a.value();
      if (!s.is_constant()) condition = phi.first(k) - condition;
      report.max_residual = std::max(report.max_residual, condition.cwiseAbs().maxCoeff());
    }
  }
  return report;
}

BilinearStructure canonical_pairing(int rank, PairingKind kind) {
  if (rank < 1) throw ShapeError("canonical_pairing: rank must be >= 1");
  Matrix phi = Matrix::Zero(2 * rank, 2 * rank);
  phi.topRightCorner(rank, rank) = Matrix::Identity(rank, rank);
  const double sign = kind == PairingKind::symmetric ? 1.0 : -1.0;
  phi.bottomLeftCorner(rank, rank) = sign * Matrix::Identity(rank, rank);
  return BilinearStructure::make(kind, std::move(phi));
}

BilinearStructure dual_structure(const BilinearStructure& s) {
  const Matrix& phi = s.matrix();
  Eigen::FullPivLU<Matrix> lu(phi);
  if (!lu.isInvertible()) throw ShapeError("dual_structure: phi is singular");
  return BilinearStructure::make(s.kind(), lu.inverse().transpose());
}

BilinearStructure direct_sum(const BilinearStructure& a, const BilinearStructure& b) {
  if (a.kind() != b.kind()) throw ShapeError("direct_sum: pairing kinds differ");
  const int na = a.size(), nb = b.size();
  Matrix phi = Matrix::Zero(na + nb, na + nb);
  phi.topLeftCorner(na, na) = a.matrix();
  phi.bottomRightCorner(nb, nb) = b.matrix();
  return BilinearStructure::make(a.kind(), std::move(phi));
}

GInverseResult g_structured_inverse(const Connection& c, const BilinearStructure& s,
                                    std::span<const Point> samples, double compat_tol) {
  ParallelReport input = check_parallel(c, s, samples);
  if (input.max_residual > compat_tol)
    throw ShapeError("g_structured_inverse: connection is not compatible with the structure "
                     "(residual " +
                     std::to_string(input.max_residual) + ")");

  InversePair ip = structured_inverse(c);
  const int m = ip.ambient.rank();

  Connection inverse_conn = direct_sum(direct_sum(dual(c), ip.w_conn), dual(ip.w_conn));
  BilinearStructure structure =
      direct_sum(dual_structure(s), canonical_pairing(m - c.rank(), s.kind()));
  BilinearStructure total = direct_sum(s, structure);

  GInverseReport report;
  report.input_compat = input.max_residual;
  report.inverse_compat = check_parallel(inverse_conn, structure, samples).max_residual;
  report.total_rank = 2 * m;
  Eigen::JacobiSVD<Matrix> svd(total.matrix());
  report.total_structure_min_sv = svd.singularValues().minCoeff();

  for (const Point& x : samples) {
    FieldEvalContext ctx(x);
    ChernForm ch_in = chern_character(c, ctx);
    ChernForm ch_inv = chern_character(inverse_conn, ctx);
    PolyForm sum_form = add(ch_in.form, ch_inv.form);
    report.ch_positive_residual =
        std::max(report.ch_positive_residual, norm_inf_positive(sum_form));
    const Matrix& deg0 = sum_form.component(0).at(IndexTuple{});
    report.ch_degree0_error =
        std::max(report.ch_degree0_error, std::abs(deg0(0, 0) - Complex(2 * m, 0)));
  }

  return GInverseResult{std::move(inverse_conn), std::move(structure), std::move(total),
                        std::move(ip), report};
}

VeniceReport venice_verify(const Connection& c, const FieldForm& eta,
                           std::span<const Point> samples) {
  for (int p : eta.degrees())
    if (p % 2 == 0) throw ShapeError("venice_verify: eta must have odd degrees only");
  if (eta.rows() != 1 || eta.cols() != 1)
    throw ShapeError("venice_verify: eta must be scalar-valued");

  VeniceReport report;
  const int n = c.dimension();
  for (const Point& x : samples) {
    FieldEvalContext ctx(x);
    ChernForm ch = chern_character(c, ctx);
    PolyForm d_eta = exterior_derivative(eta, ctx);
    for (int degree = 0; degree <= n; degree += 2) {
      double residual = 0.0;
      PolyForm target(n, 1, 1);
      if (degree == 0) target.set(IndexTuple{}, Complex(c.rank(), 0) * Matrix::Identity(1, 1));
      for (const auto& [idx, v] : d_eta.component(degree)) target.accumulate(idx, v);
      PolyForm diff(n, 1, 1);
      for (const auto& [idx, v] : ch.form.component(degree)) diff.accumulate(idx, v);
      diff = sub(diff, target);
      residual = norm_inf(diff, degree);
      auto it = report.residual_by_degree.find(degree);
      if (it == report.residual_by_degree.end())
        report.residual_by_degree[degree] = residual;
      else
        it->second = std::max(it->second, residual);
      report.max_residual = std::max(report.max_residual, residual);
    }
  }
  return report;
}

VeniceDoubleResult venice_double(const Connection& c, PairingKind kind,
                                 std::span<const Point> samples) {
  const int rank = c.rank();
  const int n = c.dimension();
  Connection doubled = direct_sum(dual(c), c);
  BilinearStructure structure = canonical_pairing(rank, kind);

  VeniceDoubleResult out{std::move(doubled), std::move(structure), 0.0, {}};
  out.compat_residual = check_parallel(out.doubled, out.structure, samples).max_residual;

  for (int degree = 2; degree <= n; degree += 2) {
    ParityEntry entry;
    entry.form_degree = degree;
    entry.doubles = (degree / 2) % 2 == 0;
    out.parity.push_back(entry);
  }

  Connection dual_c = dual(c);
  for (const Point& x : samples) {
    FieldEvalContext ctx(x);
    ChernForm ch_c = chern_character(c, ctx);
    ChernForm ch_dual = chern_character(dual_c, ctx);
    ChernForm ch_doubled = chern_character(out.doubled, ctx);
    for (ParityEntry& entry : out.parity) {
      const int degree = entry.form_degree;
      const int j = degree / 2;
      const double parity_sign = j % 2 == 0 ? 1.0 : -1.0;
      PolyForm expect_dual =
          scale(Complex(parity_sign, 0), restrict_degree(ch_c.form, degree));
      entry.dual_parity_residual =
          std::max(entry.dual_parity_residual,
                   norm_inf(sub(restrict_degree(ch_dual.form, degree), expect_dual)));
      PolyForm doubled_part = restrict_degree(ch_doubled.form, degree);
      entry.doubling_residual = std::max(
          entry.doubling_residual,
          norm_inf(sub(doubled_part,
                       scale(Complex(2, 0), restrict_degree(ch_c.form, degree)))));
      entry.doubling_explained_residual = std::max(
          entry.doubling_explained_residual,
          norm_inf(sub(doubled_part, scale(Complex(1.0 + parity_sign, 0),
                                           restrict_degree(ch_c.form, degree)))));
    }
  }
  return out;
}

}  // namespace gaugekit
