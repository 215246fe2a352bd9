#include "gaugekit/connection.hpp"

#include <cmath>

namespace gaugekit {

namespace {

const double kPi = std::acos(-1.0);
// The i/(2 pi) prefactor of the Chern character.
const Complex kChernScale = Complex(0.0, 1.0) / (2.0 * kPi);

}  // namespace

// ---------------------------------------------------------------------------
// Connection
// ---------------------------------------------------------------------------

Connection::Connection(ChartDomain domain, int rank, std::vector<SmoothMatrixField> coeff)
    : domain_(std::move(domain)), rank_(rank), coeff_(std::move(coeff)) {
  if (rank_ < 1) throw ShapeError("Connection: rank must be >= 1");
  if (static_cast<int>(coeff_.size()) != domain_.dimension())
    throw ShapeError("Connection: expected one coefficient field per coordinate");
  for (const auto& a : coeff_)
    if (a.rows() != rank_ || a.cols() != rank_)
      throw ShapeError("Connection: coefficient shape must be rank x rank");
}

Connection Connection::flat(ChartDomain domain, int rank) {
  std::vector<SmoothMatrixField> coeff(domain.dimension(),
                                       SmoothMatrixField::zero(rank, rank));
  return Connection(std::move(domain), rank, std::move(coeff));
}

FormField Connection::one_form() const {
  FormField a(dimension(), 1, rank_, rank_);
  for (int k = 0; k < dimension(); ++k) a.set({k}, coeff_[k]);
  return a;
}

std::vector<MatrixJet> Connection::eval_coeffs(FieldEvalContext& ctx, int order) const {
  std::vector<MatrixJet> out;
  out.reserve(coeff_.size());
  for (const auto& a : coeff_) out.push_back(ctx.eval(a, order));
  return out;
}

Matrix Connection::eval_combination(FieldEvalContext& ctx, const Point& weights) const {
  if (weights.size() != static_cast<Eigen::Index>(coeff_.size()))
    throw ShapeError("Connection::eval_combination: weight count mismatch");
  Matrix acc = Matrix::Zero(rank_, rank_);
  for (std::size_t k = 0; k < coeff_.size(); ++k) {
    if (weights[k] == 0.0) continue;
    acc += weights[k] * ctx.eval(coeff_[k], 0).value();
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Curvature and characteristic forms
// ---------------------------------------------------------------------------

namespace {

// F from jets of the coefficients: F_{kl} = d_k A_l - d_l A_k + [A_k, A_l].
PolyForm curvature_from_jets(const std::vector<MatrixJet>& a, int n, int rank) {
  PolyForm f(n, rank, rank);
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      Matrix v = a[l].first(k) - a[k].first(l) +
                 a[k].value() * a[l].value() - a[l].value() * a[k].value();
      f.set({k, l}, v);
    }
  return f;
}

}  // namespace

PolyForm curvature(const Connection& c, FieldEvalContext& ctx) {
  return curvature_from_jets(c.eval_coeffs(ctx, 1), c.dimension(), c.rank());
}

PolyForm curvature(const Connection& c, const Point& x) {
  FieldEvalContext ctx(x);
  return curvature(c, ctx);
}

FieldForm curvature_field(const Connection& c) {
  const int n = c.dimension();
  FieldForm f(n, c.rank(), c.rank());
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      SmoothMatrixField v = partial(k, c.coeff(l)) - partial(l, c.coeff(k)) +
                            c.coeff(k) * c.coeff(l) - c.coeff(l) * c.coeff(k);
      f.set({k, l}, v);
    }
  return f;
}

ChernForm chern_character(const Connection& c, FieldEvalContext& ctx) {
  PolyForm f = curvature(c, ctx);
  ChernForm ch{trace(exp_truncated(scale(kChernScale, f))), c.rank()};
  return ch;
}

ChernForm chern_character(const Connection& c, const Point& x) {
  FieldEvalContext ctx(x);
  return chern_character(c, ctx);
}

FieldForm chern_field(const Connection& c) {
  return trace(exp_truncated(scale(kChernScale, curvature_field(c))));
}

namespace {

void check_same_bundle(const Connection& a, const Connection& b, const char* who) {
  if (a.rank() != b.rank()) throw ShapeError(std::string(who) + ": rank mismatch");
  if (a.dimension() != b.dimension())
    throw ShapeError(std::string(who) + ": chart dimension mismatch");
}

}  // namespace

CSForm cs_form(const Connection& c0, const Connection& c1, const Point& x, int quad_nodes) {
  check_same_bundle(c0, c1, "cs_form");
  const int n = c0.dimension();
  const int r = c0.rank();
  FieldEvalContext ctx(x);
  std::vector<MatrixJet> a0 = c0.eval_coeffs(ctx, 1);
  std::vector<MatrixJet> a1 = c1.eval_coeffs(ctx, 1);

  // alpha = A1 - A0 as a pointwise 1-form
  PolyForm alpha(n, r, r);
  for (int k = 0; k < n; ++k) alpha.set({k}, Matrix(a1[k].value() - a0[k].value()));

  PolyForm acc(n, 1, 1);
  for (const QuadNode& node : gauss_legendre(quad_nodes)) {
    // jets of A_t = (1-t) A0 + t A1
    std::vector<MatrixJet> at;
    at.reserve(n);
    for (int k = 0; k < n; ++k)
      at.push_back(add(scale(Complex(1.0 - node.t, 0), a0[k], 1),
                       scale(Complex(node.t, 0), a1[k], 1), 1));
    PolyForm ft = curvature_from_jets(at, n, r);
    PolyForm integrand = trace(wedge(alpha, exp_truncated(scale(kChernScale, ft))));
    acc = add(acc, scale(Complex(node.weight, 0), integrand));
  }
  return CSForm{scale(kChernScale, acc), quad_nodes};
}

FieldForm cs_field(const Connection& c0, const Connection& c1, int quad_nodes) {
  check_same_bundle(c0, c1, "cs_field");
  const int n = c0.dimension();
  const int r = c0.rank();

  FieldForm alpha(n, r, r);
  for (int k = 0; k < n; ++k) alpha.set({k}, c1.coeff(k) - c0.coeff(k));

  FieldForm acc(n, 1, 1);
  for (const QuadNode& node : gauss_legendre(quad_nodes)) {
    std::vector<SmoothMatrixField> at;
    at.reserve(n);
    for (int k = 0; k < n; ++k)
      at.push_back(scale(Complex(1.0 - node.t, 0), c0.coeff(k)) +
                   scale(Complex(node.t, 0), c1.coeff(k)));
    Connection ct(c0.domain(), r, std::move(at));
    FieldForm ft = curvature_field(ct);
    FieldForm integrand = trace(wedge(alpha, exp_truncated(scale(kChernScale, ft))));
    acc = add(acc, scale(Complex(node.weight, 0), integrand));
  }
  return scale(kChernScale, acc);
}

// ---------------------------------------------------------------------------
// Functorial constructions
// ---------------------------------------------------------------------------

Connection direct_sum(const Connection& a, const Connection& b) {
  if (a.dimension() != b.dimension())
    throw ShapeError("direct_sum: chart dimension mismatch");
  const int ra = a.rank(), rb = b.rank();
  std::vector<SmoothMatrixField> coeff;
  coeff.reserve(a.dimension());
  for (int k = 0; k < a.dimension(); ++k)
    coeff.push_back(block({{a.coeff(k), SmoothMatrixField::zero(ra, rb)},
                           {SmoothMatrixField::zero(rb, ra), b.coeff(k)}}));
  return Connection(a.domain(), ra + rb, std::move(coeff));
}

Connection dual(const Connection& c) {
  std::vector<SmoothMatrixField> coeff;
  coeff.reserve(c.dimension());
  for (int k = 0; k < c.dimension(); ++k)
    coeff.push_back(scale(Complex(-1, 0), transpose(c.coeff(k))));
  return Connection(c.domain(), c.rank(), std::move(coeff));
}

Connection pullback(const AffineMap& f, const Connection& c, ChartDomain target) {
  const int n = c.dimension();
  const int m = target.dimension();
  if (f.jacobian.rows() != n || f.offset.size() != n)
    throw ShapeError("pullback: map target dimension does not match the connection chart");
  if (f.jacobian.cols() != m)
    throw ShapeError("pullback: map source dimension does not match the new chart");
  std::vector<SmoothMatrixField> coeff;
  coeff.reserve(m);
  for (int j = 0; j < m; ++j) {
    std::vector<SmoothMatrixField> terms;
    for (int k = 0; k < n; ++k) {
      if (f.jacobian(k, j) == 0.0) continue;
      terms.push_back(scale(Complex(f.jacobian(k, j), 0),
                            affine_pullback(c.coeff(k), f.jacobian, f.offset)));
    }
    coeff.push_back(terms.empty() ? SmoothMatrixField::zero(c.rank(), c.rank())
                                  : sum(std::move(terms)));
  }
  return Connection(std::move(target), c.rank(), std::move(coeff));
}

Connection gauge_transform(const Connection& c, const SmoothMatrixField& u) {
  if (u.rows() != c.rank() || u.cols() != c.rank())
    throw ShapeError("gauge_transform: gauge field shape mismatch");
  SmoothMatrixField u_inv = inverse(u);
  std::vector<SmoothMatrixField> coeff;
  coeff.reserve(c.dimension());
  for (int k = 0; k < c.dimension(); ++k)
    coeff.push_back((u * c.coeff(k) - partial(k, u)) * u_inv);
  return Connection(c.domain(), c.rank(), std::move(coeff));
}

// ---------------------------------------------------------------------------
// Subbundles
// ---------------------------------------------------------------------------

int ProjectionField::validate(std::span<const Point> samples, double tol) const {
  if (P.rows() != P.cols()) throw ShapeError("ProjectionField: P must be square");
  if (samples.empty()) throw ShapeError("ProjectionField: no sample points");
  double rank_value = -1.0;
  for (const Point& x : samples) {
    Matrix p = P.value(x);
    if (((p * p) - p).cwiseAbs().maxCoeff() > tol)
      throw ShapeError("ProjectionField: P^2 != P at a sample point");
    if ((p - p.adjoint()).cwiseAbs().maxCoeff() > tol)
      throw ShapeError("ProjectionField: P is not hermitian at a sample point");
    const double tr = p.trace().real();
    if (rank_value < 0) {
      rank_value = tr;
      if (std::abs(tr - std::round(tr)) > tol)
        throw ShapeError("ProjectionField: trace(P) is not an integer");
    } else if (std::abs(tr - rank_value) > tol) {
      throw ShapeError("ProjectionField: trace(P) varies across samples");
    }
  }
  return static_cast<int>(std::llround(rank_value));
}

SmoothMatrixField projector_frame(const ProjectionField& P, const Point& x0) {
  Matrix p = P.P.value(x0);
  const int m = static_cast<int>(p.rows());
  const int r = static_cast<int>(std::llround(p.trace().real()));
  if (r < 1 || r > m) throw ShapeError("projector_frame: projector rank out of range");
  Matrix frame(m, r);
  Matrix cols = p;  // columns span the image
  std::vector<bool> used(m, false);
  for (int j = 0; j < r; ++j) {
    // deterministic column pivoting: largest remaining norm
    int pivot = -1;
    double best = -1.0;
    for (int c = 0; c < m; ++c) {
      if (used[c]) continue;
      const double nrm = cols.col(c).norm();
      if (nrm > best) {
        best = nrm;
        pivot = c;
      }
    }
    if (pivot < 0 || best < 1e-12)
      throw ShapeError("projector_frame: projector columns do not span the claimed rank");
    used[pivot] = true;
    Eigen::VectorXcd v = cols.col(pivot) / best;
    frame.col(j) = v;
    // deflate the remaining columns
    for (int c = 0; c < m; ++c)
      if (!used[c]) cols.col(c) -= v * (v.adjoint() * cols.col(c));
  }
  return SmoothMatrixField::constant(frame);
}

Connection induce(const ProjectionField& P, const Connection& ambient,
                  std::optional<SmoothMatrixField> frame, std::span<const Point> samples) {
  if (P.ambient_rank() != ambient.rank())
    throw ShapeError("induce: projector and ambient rank mismatch");
  const int sub_rank = P.validate(samples);
  SmoothMatrixField fr = frame ? *frame : projector_frame(P, ambient.domain().center());
  if (fr.rows() != ambient.rank() || fr.cols() != sub_rank)
    throw ShapeError("induce: frame shape does not match the subbundle");
  for (const Point& x : samples) {
    Matrix f = fr.value(x);
    if ((f.adjoint() * f - Matrix::Identity(sub_rank, sub_rank)).cwiseAbs().maxCoeff() > 1e-10)
      throw ShapeError("induce: frame is not orthonormal at a sample point");
    if ((P.P.value(x) * f - f).cwiseAbs().maxCoeff() > 1e-10)
      throw ShapeError("induce: frame does not lie in the image of P");
  }
  std::vector<SmoothMatrixField> coeff;
  coeff.reserve(ambient.dimension());
  for (int k = 0; k < ambient.dimension(); ++k)
    coeff.push_back(adjoint(fr) * (partial(k, fr) + ambient.coeff(k) * fr));
  return Connection(ambient.domain(), sub_rank, std::move(coeff));
}

LemmaSSReport lemma_ss_check(const Connection& ambient, const ProjectionField& P_V,
                             const ProjectionField& P_W, std::span<const Point> samples,
                             double block_tol) {
  LemmaSSReport report;
  report.sample_count = static_cast<int>(samples.size());
  const int m = ambient.rank();
  for (const Point& x : samples) {
    Matrix sum_p = P_V.P.value(x) + P_W.P.value(x);
    report.projector_residual = std::max(
        report.projector_residual,
        (sum_p - Matrix::Identity(m, m)).cwiseAbs().maxCoeff());
  }
  if (report.projector_residual > 1e-10)
    throw ShapeError("lemma_ss_check: P_V + P_W != I");

  Connection v = induce(P_V, ambient, std::nullopt, samples);
  Connection w = induce(P_W, ambient, std::nullopt, samples);
  Connection split = direct_sum(v, w);

  const Matrix id = Matrix::Identity(m, m);
  for (const Point& x : samples) {
    FieldEvalContext ctx(x);
    PolyForm f = curvature(ambient, ctx);
    Matrix pv = ctx.eval(P_V.P, 0).value();
    Matrix pw = ctx.eval(P_W.P, 0).value();
    if (f.dimension() >= 2) {
      for (const auto& [idx, coeff] : f.component(2)) {
        report.block_residual_v =
            std::max(report.block_residual_v, ((id - pv) * coeff * pv).cwiseAbs().maxCoeff());
        report.block_residual_w =
            std::max(report.block_residual_w, ((id - pw) * coeff * pw).cwiseAbs().maxCoeff());
      }
    }
    ChernForm ch_ambient = chern_character(ambient, ctx);
    ChernForm ch_split = chern_character(split, ctx);
    report.ch_residual =
        std::max(report.ch_residual, norm_inf(sub(ch_split.form, ch_ambient.form)));
  }
  report.hypotheses_hold =
      report.block_residual_v <= block_tol && report.block_residual_w <= block_tol;
  return report;
}

}  // namespace gaugekit
