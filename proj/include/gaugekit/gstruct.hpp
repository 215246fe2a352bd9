#ifndef GAUGEKIT_GSTRUCT_HPP
#define GAUGEKIT_GSTRUCT_HPP

#include "gaugekit/flatten.hpp"

namespace gaugekit {

enum class PairingKind { symmetric, antisymmetric };

/// A fiberwise nondegenerate symmetric or antisymmetric bilinear form,
/// defining an SO- respectively Sp-structure. Constant forms are the main
/// case; non-constant forms are supported by check_parallel only.
class BilinearStructure {
public:
  /// Constant form; the matrix is symmetrized/antisymmetrized to make the
  /// kind invariant exact and must be nondegenerate.
  static BilinearStructure make(PairingKind kind, Matrix phi);
  /// Non-constant form given as a field.
  static BilinearStructure make_field(PairingKind kind, SmoothMatrixField phi);

  PairingKind kind() const noexcept { return kind_; }
  bool is_constant() const noexcept { return constant_; }
  int size() const { return field_.rows(); }
  const Matrix& matrix() const;
  const SmoothMatrixField& field() const noexcept { return field_; }

private:
  BilinearStructure(PairingKind kind, bool constant, Matrix value, SmoothMatrixField field)
      : kind_(kind), constant_(constant), value_(std::move(value)), field_(std::move(field)) {}

  PairingKind kind_;
  bool constant_;
  Matrix value_;
  SmoothMatrixField field_;
};

struct ParallelReport {
  double max_residual = 0.0;
  int sample_count = 0;
};

/// Residual of the parallelism condition d_k phi = A_k^T phi + phi A_k
/// (for constant phi the Lie-algebra condition A_k^T phi + phi A_k = 0).
ParallelReport check_parallel(const Connection& c, const BilinearStructure& s,
                              std::span<const Point> samples);

/// The canonical G-structure on W (+) W*: [[0, I], [I, 0]] respectively
/// [[0, I], [-I, 0]].
BilinearStructure canonical_pairing(int rank, PairingKind kind);

/// The structure phi' = (phi^{-1})^T induced on the dual bundle by the
/// contraction isomorphism; preserves the kind.
BilinearStructure dual_structure(const BilinearStructure& s);

/// Block-diagonal sum of two structures of the same kind.
BilinearStructure direct_sum(const BilinearStructure& a, const BilinearStructure& b);

struct GInverseReport {
  double input_compat = 0.0;          // check_parallel(c, s)
  double inverse_compat = 0.0;        // check_parallel(inverse_conn, structure)
  double ch_positive_residual = 0.0;  // positive degrees of ch(c) + ch(inverse)
  double ch_degree0_error = 0.0;      // against 2M
  double total_structure_min_sv = 0.0;  // smallest singular value of phi_total
  int total_rank = 0;                 // 2M
};

struct GInverseResult {
  Connection inverse_conn;
  BilinearStructure structure;        // on the inverse bundle
  BilinearStructure total_structure;  // on input (+) inverse
  InversePair unstructured;           // the underlying GL-inverse
  GInverseReport report;
};

/// The G-structured inverse E* (+) W (+) W* with connection
/// dual(c) (+) W_conn (+) dual(W_conn) and structure phi' (+) phi_0.
/// Requires check_parallel(c, s) <= compat_tol.
GInverseResult g_structured_inverse(const Connection& c, const BilinearStructure& s,
                                    std::span<const Point> samples,
                                    double compat_tol = 1e-9);

struct VeniceReport {
  std::map<int, double> residual_by_degree;  // |ch(c) - rank - d eta| per even degree
  double max_residual = 0.0;
};

/// Checks ch(c) - rank = d eta pointwise; eta must have odd degrees only.
VeniceReport venice_verify(const Connection& c, const FieldForm& eta,
                           std::span<const Point> samples);

struct ParityEntry {
  int form_degree = 0;                     // 2j
  double dual_parity_residual = 0.0;       // |ch_{2j}(dual) - (-1)^j ch_{2j}|
  double doubling_residual = 0.0;          // |ch_{2j}(doubled) - 2 ch_{2j}|
  double doubling_explained_residual = 0.0;  // |ch_{2j}(doubled) - (1+(-1)^j) ch_{2j}|
  bool doubles = false;                    // j even: the doubling identity holds
};

struct VeniceDoubleResult {
  Connection doubled;            // dual(c) (+) c
  BilinearStructure structure;   // canonical pairing
  double compat_residual = 0.0;
  std::vector<ParityEntry> parity;
};

/// The doubling construction dual(c) (+) c with its canonical pairing, and
/// the per-degree parity report: the doubling identity holds exactly in
/// form degrees divisible by 4 and fails otherwise, which the report flags.
VeniceDoubleResult venice_double(const Connection& c, PairingKind kind,
                                 std::span<const Point> samples);

}  // namespace gaugekit

#endif
