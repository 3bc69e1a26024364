#pragma once

#include <random>

namespace bli {

template <typename Rng>
Matrix random_orthogonal(Eigen::Index d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) g(r, c) = normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  // Scale columns by sign(diag(R)) so the result is Haar distributed.
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index c = 0; c < d; ++c) {
    if (r(c, c) < 0) q.col(c) *= -1.0;
  }
  return q;
}

}  // namespace bli
