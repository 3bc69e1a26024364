#pragma once

// Dense kernels shared by every alignment method: cosine similarity, SVD,
// the orthogonal Procrustes solution and the orthogonal retraction step.
//
// Convention: anchor and embedding matrices store one word per row. A
// mapping W (d x d) sends a source row x to W x, so a whole matrix X maps
// to X W^T.

#include "bli/common.hpp"

namespace bli {

/// The d x d linear map from the source space into the target space.
struct MappingMatrix {
  Matrix w;

  Eigen::Index dim() const { return w.rows(); }
  static MappingMatrix identity(Eigen::Index d) { return {Matrix::Identity(d, d)}; }
  /// Maps every row of `rows`.
  Matrix apply(const Matrix& rows) const { return rows * w.transpose(); }
};

/// Frobenius norm of W W^T - I.
double orthogonality_error(const MappingMatrix& m);

struct RetractionConfig {
  double beta = 0.001;
};

/// dot(u, v) / (|u| |v|) clamped to [-1, 1].
double cosine(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v);

struct SvdResult {
  Matrix u;
  Vector singular_values;  // non-negative, descending
  Matrix vt;
};

/// Thin SVD. Signs are fixed so the largest-magnitude entry of every column
/// of U is positive, which makes the factors deterministic.
SvdResult svd(const Matrix& m);

/// Orthogonal W minimizing |W x_i - y_i| summed over anchor rows:
/// W = U V^T where U S V^T = SVD(Y^T X).
MappingMatrix procrustes_solve(const Matrix& x_anchors, const Matrix& y_anchors);

/// W <- (1 + beta) W - beta (W W^T) W.
MappingMatrix orthogonal_retraction(const MappingMatrix& m, const RetractionConfig& config);

/// Applies the retraction until orthogonality_error <= tol or max_iterations
/// is reached.
MappingMatrix retract_until(MappingMatrix m, const RetractionConfig& config, double tol,
                            int max_iterations);

/// Random orthogonal matrix from the QR decomposition of a Gaussian matrix.
template <typename Rng>
Matrix random_orthogonal(Eigen::Index d, Rng& rng);

}  // namespace bli

#include "bli/detail/random_orthogonal.ipp"
