#include "gaugekit/flatten.hpp"

#include <Eigen/Eigenvalues>
#include <limits>

namespace gaugekit {

PosDefSplit decompose_posdef(const SmoothMatrixField& coeff) {
  if (coeff.rows() != coeff.cols()) throw ShapeError("decompose_posdef: field is not square");
  const int r = coeff.rows();
  SmoothMatrixField two_id = SmoothMatrixField::constant(2.0 * Matrix::Identity(r, r));
  SmoothMatrixField gram = adjoint(coeff) * coeff;
  return PosDefSplit{two_id + gram + coeff, two_id + gram};
}

PairList build_pairs(const Connection& c) {
  PairList out;
  out.rank = c.rank();
  const int n = c.dimension();
  out.pairs.reserve(2 * n);
  for (int k = 0; k < n; ++k) {
    PosDefSplit split = decompose_posdef(c.coeff(k));
    Expr xk = Expr::coordinate(k);
    Expr minus_xk = Expr::literal(Complex(-1, 0)) * xk;
    // dx^k = e^{-x^k} d(e^{x^k}) carries pos, -dx^k = e^{x^k} d(e^{-x^k}) carries neg
    out.pairs.push_back(
        {smul(SmoothMatrixField::from_expr(exp(minus_xk)), split.pos), exp(xk)});
    out.pairs.push_back(
        {smul(SmoothMatrixField::from_expr(exp(xk)), split.neg), exp(minus_xk)});
  }
  return out;
}

AssembledG assemble_g(const PairList& pairs, int rank, int dimension) {
  const int n = dimension;
  const int r = rank;
  const int blocks = 2 * n + 2;
  if (static_cast<int>(pairs.pairs.size()) != 2 * n)
    throw ShapeError("assemble_g: expected 2n pairs");

  std::vector<SmoothMatrixField> weighted;
  weighted.reserve(2 * n);
  for (const auto& p : pairs.pairs)
    weighted.push_back(smul(SmoothMatrixField::from_expr(p.h), p.f));
  SmoothMatrixField s = sum(weighted);
  SmoothMatrixField s_inv = inverse(s);

  const SmoothMatrixField id = SmoothMatrixField::identity(r);
  const SmoothMatrixField zero = SmoothMatrixField::zero(r, r);

  std::vector<std::vector<SmoothMatrixField>> grid(
      blocks, std::vector<SmoothMatrixField>(blocks, zero));
  for (int j = 0; j < 2 * n; ++j)
    grid[0][j] = smul(SmoothMatrixField::from_expr(pairs.pairs[j].h), id);
  grid[0][2 * n] = id;
  grid[0][2 * n + 1] = id;
  for (int i = 0; i < 2 * n; ++i) {
    grid[i + 1][i] = id;
    grid[i + 1][2 * n] = pairs.pairs[i].f * s_inv;
  }
  grid[blocks - 1][2 * n] = s_inv;
  grid[blocks - 1][2 * n + 1] = id;

  SmoothMatrixField g = block(grid);

  std::vector<std::vector<SmoothMatrixField>> column;
  column.reserve(blocks);
  for (int i = 0; i < 2 * n; ++i) column.push_back({pairs.pairs[i].f});
  column.push_back({scale(Complex(-1, 0), s)});
  column.push_back({id});

  return AssembledG{g, inverse(g), block(column), s};
}

FlatPresentation flatten(const Connection& c) {
  const int n = c.dimension();
  const int r = c.rank();

  FlatPresentation fp{c,  PairList{}, SmoothMatrixField{}, SmoothMatrixField{},
                      SmoothMatrixField{}, SmoothMatrixField{}, SmoothMatrixField{},
                      FormField(n, 1, (2 * n + 2) * r, (2 * n + 2) * r),
                      {},  (2 * n + 2) * r};

  fp.pairs = build_pairs(c);
  AssembledG for_a = assemble_g(fp.pairs, r, n);
  fp.g = for_a.g;
  fp.g_inv = for_a.g_inv;
  fp.inv_column_block = for_a.inv_column_block;

  // Sign bridge: the flat ambient inducing +A comes from g~ assembled for
  // -A, with B = -d g~ g~^{-1}.
  std::vector<SmoothMatrixField> negated;
  negated.reserve(n);
  for (int k = 0; k < n; ++k) negated.push_back(scale(Complex(-1, 0), c.coeff(k)));
  Connection minus_a(c.domain(), r, std::move(negated));
  AssembledG for_minus = assemble_g(build_pairs(minus_a), r, n);
  fp.transporter = for_minus.g;
  fp.transporter_inv = for_minus.g_inv;

  fp.b_coeff.reserve(n);
  for (int k = 0; k < n; ++k) {
    SmoothMatrixField bk =
        scale(Complex(-1, 0), partial(k, fp.transporter) * fp.transporter_inv);
    fp.b_coeff.push_back(bk);
    fp.B.set({k}, bk);
  }
  return fp;
}

InversePair structured_inverse(const Connection& c) {
  FlatPresentation fp = flatten(c);
  const int r = c.rank();
  const int m = fp.ambient_rank;
  const int n = c.dimension();

  std::vector<SmoothMatrixField> v_coeff, w_coeff;
  v_coeff.reserve(n);
  w_coeff.reserve(n);
  for (int k = 0; k < n; ++k) {
    v_coeff.push_back(slice(fp.b_coeff[k], 0, 0, r, r));
    w_coeff.push_back(slice(fp.b_coeff[k], r, r, m - r, m - r));
  }
  Connection ambient = fp.ambient();
  return InversePair{Connection(c.domain(), r, std::move(v_coeff)),
                     Connection(c.domain(), m - r, std::move(w_coeff)),
                     std::move(ambient), std::move(fp)};
}

RankCheck rank_check(long n, long r) {
  if (n < 1 || r < 1) throw ShapeError("rank_check: n and r must be >= 1");
  RankCheck out;
  out.lemma_rank = (2 * n + 2) * r;
  out.proposition_rank = (4 * n + 8 * r + 2) * (n + 2 * r);
  // the proposition applies the lemma over R^{2n+4r} to a rank n+2r bundle
  const long composed = (2 * (2 * n + 4 * r) + 2) * (n + 2 * r);
  out.consistent = composed == out.proposition_rank;
  return out;
}

// ---------------------------------------------------------------------------
// Verification
// ---------------------------------------------------------------------------

namespace {

double min_hermitian_part_eig(const Matrix& f) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(f + f.adjoint());
  return eig.eigenvalues().minCoeff();
}

}  // namespace

FlatCheckReport verify_flat_presentation(const FlatPresentation& fp,
                                         std::span<const Point> samples) {
  FlatCheckReport report;
  report.sample_count = static_cast<int>(samples.size());
  report.min_abs_det = std::numeric_limits<double>::infinity();
  report.min_pair_eig = std::numeric_limits<double>::infinity();
  report.min_h = std::numeric_limits<double>::infinity();

  const Connection& c = fp.source;
  const int n = c.dimension();
  const int r = c.rank();
  Connection ambient = fp.ambient();

  Matrix column_target = Matrix::Zero(fp.ambient_rank, r);
  column_target.topRows(r) = Matrix::Identity(r, r);

  for (const Point& x : samples) {
    FieldEvalContext ctx(x);
    std::vector<MatrixJet> a = c.eval_coeffs(ctx, 0);
    const MatrixJet& g = ctx.eval(fp.g, 1);
    const MatrixJet& g_inv = ctx.eval(fp.g_inv, 0);

    for (int k = 0; k < n; ++k) {
      Matrix top = (g.first(k) * g_inv.value()).topLeftCorner(r, r);
      report.lemma_residual =
          std::max(report.lemma_residual, (top - a[k].value()).cwiseAbs().maxCoeff());
    }

    const MatrixJet& column = ctx.eval(fp.inv_column_block, 0);
    report.column_residual = std::max(
        report.column_residual,
        (g.value() * column.value() - column_target).cwiseAbs().maxCoeff());

    report.min_abs_det = std::min(report.min_abs_det, std::abs(g.value().determinant()));

    // sum f_k dh_k = A, positivity of the pairs
    std::vector<Matrix> pair_sum(n, Matrix::Zero(r, r));
    for (const auto& p : fp.pairs.pairs) {
      ScalarJet h = p.h.eval(x, 1);
      const MatrixJet& f = ctx.eval(p.f, 0);
      for (int k = 0; k < n; ++k)
        if (h.first(k) != Complex(0, 0)) pair_sum[k] += h.first(k) * f.value();
      report.min_pair_eig = std::min(report.min_pair_eig, min_hermitian_part_eig(f.value()));
      report.min_h = std::min(report.min_h, h.value.real());
    }
    for (int k = 0; k < n; ++k)
      report.pair_residual =
          std::max(report.pair_residual, (pair_sum[k] - a[k].value()).cwiseAbs().maxCoeff());

    // ambient: top-left block reproduces +A, curvature vanishes
    for (int k = 0; k < n; ++k) {
      const MatrixJet& bk = ctx.eval(fp.b_coeff[k], 0);
      report.top_block_residual = std::max(
          report.top_block_residual,
          (bk.value().topLeftCorner(r, r) - a[k].value()).cwiseAbs().maxCoeff());
    }
    report.flatness_residual =
        std::max(report.flatness_residual, norm_inf(curvature(ambient, ctx)));
  }
  return report;
}

InverseCheckReport verify_inverse_pair(const InversePair& ip, std::span<const Point> samples) {
  InverseCheckReport report;
  const int m = ip.ambient.rank();

  for (const Point& x : samples) {
    FieldEvalContext ctx(x);
    report.flatness_residual =
        std::max(report.flatness_residual, norm_inf(curvature(ip.ambient, ctx)));
    ChernForm ch_v = chern_character(ip.v_conn, ctx);
    ChernForm ch_w = chern_character(ip.w_conn, ctx);
    PolyForm total = add(ch_v.form, ch_w.form);
    report.ch_positive_residual =
        std::max(report.ch_positive_residual, norm_inf_positive(total));
    const Matrix& deg0 = total.component(0).at(IndexTuple{});
    report.ch_degree0_error =
        std::max(report.ch_degree0_error, std::abs(deg0(0, 0) - Complex(m, 0)));
  }

  const int r = ip.v_conn.rank();
  Matrix pv = Matrix::Zero(m, m);
  pv.topLeftCorner(r, r) = Matrix::Identity(r, r);
  Matrix pw = Matrix::Identity(m, m) - pv;
  report.ss = lemma_ss_check(ip.ambient, ProjectionField{SmoothMatrixField::constant(pv)},
                             ProjectionField{SmoothMatrixField::constant(pw)}, samples);
  return report;
}

}  // namespace gaugekit
