#ifndef GAUGEKIT_FLATTEN_HPP
#define GAUGEKIT_FLATTEN_HPP

#include "gaugekit/connection.hpp"

namespace gaugekit {

/// A_k written as pos - neg with pos = 2I + A_k^dag A_k + A_k and
/// neg = 2I + A_k^dag A_k; both have positive-definite hermitian part.
struct PosDefSplit {
  SmoothMatrixField pos;
  SmoothMatrixField neg;
};

PosDefSplit decompose_posdef(const SmoothMatrixField& coeff);

/// One term of A = sum f_k dh_k: a positive-definite matrix factor and a
/// positive scalar function h.
struct FlatteningPair {
  SmoothMatrixField f;
  Expr h;
};

/// The 2n pairs with h_{2k-1} = e^{x^k}, h_{2k} = e^{-x^k}.
struct PairList {
  std::vector<FlatteningPair> pairs;
  int rank = 0;
};

PairList build_pairs(const Connection& c);

/// The assembled (2n+2)r x (2n+2)r matrix g, its inverse field, and the
/// asserted first column block [f_1; ...; f_{2n}; -sum h_k f_k; I] of g^{-1}.
struct AssembledG {
  SmoothMatrixField g;
  SmoothMatrixField g_inv;
  SmoothMatrixField inv_column_block;  // (2n+2)r x r
  SmoothMatrixField weighted_sum;      // S = sum h_k f_k
};

AssembledG assemble_g(const PairList& pairs, int rank, int dimension);

/// Output of the flattening lemma, under the convention F = dA + A^A:
/// g realizes A as the top-left block of dg g^{-1}, while the flat ambient
/// matrix is B = -d g~ g~^{-1} with g~ assembled for -A, so that d + B is
/// flat and its top-left block is +A.
struct FlatPresentation {
  Connection source;
  PairList pairs;                      // pairs for A itself
  SmoothMatrixField g;                 // assembled for A
  SmoothMatrixField g_inv;
  SmoothMatrixField inv_column_block;
  SmoothMatrixField transporter;       // g~, assembled for -A
  SmoothMatrixField transporter_inv;
  FormField B;                         // degree-1, coefficients -d_k g~ g~^{-1}
  std::vector<SmoothMatrixField> b_coeff;
  int ambient_rank = 0;                // (2n+2) r

  Connection ambient() const { return Connection(source.domain(), ambient_rank, b_coeff); }
};

FlatPresentation flatten(const Connection& c);

/// The structured-inverse data: V with the induced (= original) connection,
/// W with the complementary induced connection, and the flat ambient.
struct InversePair {
  Connection v_conn;
  Connection w_conn;
  Connection ambient;
  FlatPresentation presentation;
};

InversePair structured_inverse(const Connection& c);

struct RankCheck {
  long lemma_rank;        // (2n+2) r
  long proposition_rank;  // (4n+8r+2)(n+2r)
  bool consistent;        // proposition rank = lemma rank over R^{2n+4r} at rank n+2r
};

RankCheck rank_check(long n, long r);

// --- verification ------------------------------------------------------------

struct FlatCheckReport {
  double lemma_residual = 0.0;      // max |(dg g^{-1})_{1..r,1..r} - A|
  double column_residual = 0.0;     // max |g * column_block - [I;0;...;0]|
  double min_abs_det = 0.0;         // min |det g|
  double pair_residual = 0.0;       // max |sum f_k dh_k - A|
  double min_pair_eig = 0.0;        // min eigenvalue of f_k + f_k^dag
  double min_h = 0.0;               // min h_k
  double top_block_residual = 0.0;  // max |B_{1..r,1..r} - A|
  double flatness_residual = 0.0;   // max |dB + B^B|
  int sample_count = 0;
};

FlatCheckReport verify_flat_presentation(const FlatPresentation& fp,
                                         std::span<const Point> samples);

struct InverseCheckReport {
  double flatness_residual = 0.0;
  double ch_positive_residual = 0.0;  // positive degrees of ch(V) + ch(W)
  double ch_degree0_error = 0.0;      // |ch_0(V) + ch_0(W) - M|
  LemmaSSReport ss;
};

InverseCheckReport verify_inverse_pair(const InversePair& ip, std::span<const Point> samples);

}  // namespace gaugekit

#endif
