#ifndef GAUGEKIT_CONNECTION_HPP
#define GAUGEKIT_CONNECTION_HPP

#include <optional>
#include <span>

#include "gaugekit/forms.hpp"
#include "gaugekit/sampling.hpp"

namespace gaugekit {

/// A connection d + A on the trivial rank-r bundle over a chart: the n
/// coefficient fields of A = sum_k A_k dx^k.
///
/// Convention, used everywhere in this library: curvature F = dA + A^A for
/// d + A acting on column sections, gauge action A -> uAu^{-1} - (du)u^{-1}.
class Connection {
public:
  Connection(ChartDomain domain, int rank, std::vector<SmoothMatrixField> coeff);

  /// A = 0 on a trivial bundle.
  static Connection flat(ChartDomain domain, int rank);

  const ChartDomain& domain() const noexcept { return domain_; }
  int rank() const noexcept { return rank_; }
  int dimension() const { return domain_.dimension(); }
  const SmoothMatrixField& coeff(int k) const { return coeff_.at(k); }
  const std::vector<SmoothMatrixField>& coeffs() const noexcept { return coeff_; }

  /// A as a degree-1 FormField.
  FormField one_form() const;

  /// Jets of every A_k at ctx's point, sharing the evaluation cache.
  std::vector<MatrixJet> eval_coeffs(FieldEvalContext& ctx, int order) const;

  /// Value of sum_k w_k A_k(x); used by the transport integrator.
  Matrix eval_combination(FieldEvalContext& ctx, const Point& weights) const;

private:
  ChartDomain domain_;
  int rank_;
  std::vector<SmoothMatrixField> coeff_;
};

/// An orthogonal projection field P onto a subbundle of a trivial bundle.
struct ProjectionField {
  SmoothMatrixField P;

  int ambient_rank() const { return P.rows(); }

  /// Checks P^2 = P and P = P^dagger at the samples, and that trace(P) is
  /// a constant integer; returns that integer (the subbundle rank).
  int validate(std::span<const Point> samples, double tol = 1e-10) const;
};

/// Chern character form value: scalar coefficients, even degrees, and
/// degree-0 part equal to the bundle rank.
struct ChernForm {
  PolyForm form;
  int rank;
};

/// Chern-Simons transgression value: scalar coefficients, odd degrees.
struct CSForm {
  PolyForm form;
  int quad_nodes;
};

/// x = jacobian * y + offset, with constant Jacobian.
struct AffineMap {
  RealMatrix jacobian;
  Point offset;
};

// --- curvature and characteristic forms --------------------------------------

/// F = dA + A^A at x: a degree-2 matrix-valued form.
PolyForm curvature(const Connection& c, const Point& x);
PolyForm curvature(const Connection& c, FieldEvalContext& ctx);
/// Curvature with field coefficients (partial() nodes); evaluating it at
/// order m needs jets of A at order m+1.
FieldForm curvature_field(const Connection& c);

/// ch(A) = Tr exp((i/2pi) F) at x.
ChernForm chern_character(const Connection& c, const Point& x);
ChernForm chern_character(const Connection& c, FieldEvalContext& ctx);
/// ch with field coefficients, for closedness tests.
FieldForm chern_field(const Connection& c);

/// Chern-Simons form of the linear path (1-t)c0 + t c1, integrated with
/// Gauss-Legendre quadrature:
///   CS = (i/2pi) * int_0^1 Tr((A1 - A0) ^ exp((i/2pi) F_t)) dt.
CSForm cs_form(const Connection& c0, const Connection& c1, const Point& x, int quad_nodes);
/// Same transgression with field coefficients, so that d(CS) can be
/// evaluated numerically.
FieldForm cs_field(const Connection& c0, const Connection& c1, int quad_nodes);

// --- functorial constructions -------------------------------------------------

Connection direct_sum(const Connection& a, const Connection& b);
/// Dual connection on E*: coefficients -A_k^T.
Connection dual(const Connection& c);
/// Pull back along the affine map f(y) = jacobian*y + offset from
/// `target` into c's chart.
Connection pullback(const AffineMap& f, const Connection& c, ChartDomain target);
/// Gauge transform by an invertible matrix field u.
Connection gauge_transform(const Connection& c, const SmoothMatrixField& u);

/// Connection induced on the image of P from an ambient connection, in the
/// given orthonormal frame: A^V_k = frame^dagger (d_k frame + A_k frame).
/// Without an explicit frame a constant frame is built by pivoted
/// Gram-Schmidt from P at the domain center (valid for constant P).
Connection induce(const ProjectionField& P, const Connection& ambient,
                  std::optional<SmoothMatrixField> frame, std::span<const Point> samples);

/// Constant frame spanning the image of P(x0), by modified Gram-Schmidt
/// with deterministic column pivoting.
SmoothMatrixField projector_frame(const ProjectionField& P, const Point& x0);

// --- the Simons-Sullivan hypothesis check ------------------------------------

struct LemmaSSReport {
  double projector_residual = 0.0;   // max |P_V + P_W - I|
  double block_residual_v = 0.0;     // max |(I-P_V) F P_V|
  double block_residual_w = 0.0;     // max |(I-P_W) F P_W|
  double ch_residual = 0.0;          // max |ch(V (+) W) - ch(ambient)|
  bool hypotheses_hold = false;      // block residuals within tolerance
  int sample_count = 0;
};

/// Checks the curvature block-preservation hypotheses and the equality of
/// Chern forms for the splitting defined by P_V + P_W = I. On a chart the
/// ch equality certifies the lemma's "CS = 0 modulo exact forms".
LemmaSSReport lemma_ss_check(const Connection& ambient, const ProjectionField& P_V,
                             const ProjectionField& P_W, std::span<const Point> samples,
                             double block_tol = 1e-8);

}  // namespace gaugekit

#endif
