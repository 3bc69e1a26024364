#include "bli/geometry.hpp"

#include <algorithm>
#include <string>

namespace bli {

double orthogonality_error(const MappingMatrix& m) {
  const Eigen::Index d = m.dim();
  return (m.w * m.w.transpose() - Matrix::Identity(d, d)).norm();
}

double cosine(const Eigen::Ref<const Vector>& u, const Eigen::Ref<const Vector>& v) {
  if (u.size() != v.size()) {
    throw Error("cosine: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                std::to_string(v.size()) + ")");
  }
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) throw Error("cosine: zero vector");
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

SvdResult svd(const Matrix& m) {
  if (!m.allFinite()) throw Error("svd: non-finite input");
  Eigen::BDCSVD<Matrix> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult out{dec.matrixU(), dec.singularValues(), dec.matrixV().transpose()};
  for (Eigen::Index c = 0; c < out.u.cols(); ++c) {
    Eigen::Index arg = 0;
    out.u.col(c).cwiseAbs().maxCoeff(&arg);
    if (out.u(arg, c) < 0) {
      out.u.col(c) *= -1.0;
      out.vt.row(c) *= -1.0;
    }
  }
  return out;
}

MappingMatrix procrustes_solve(const Matrix& x_anchors, const Matrix& y_anchors) {
  if (x_anchors.rows() == 0) throw Error("procrustes: no anchor pairs");
  if (x_anchors.rows() != y_anchors.rows() || x_anchors.cols() != y_anchors.cols()) {
    throw Error("procrustes: anchor matrices differ in shape");
  }
  const Matrix cross = y_anchors.transpose() * x_anchors;
  if (cross.isZero(0.0)) throw Error("procrustes: degenerate anchors (zero cross-covariance)");
  const SvdResult f = svd(cross);
  return {f.u * f.vt};
}

MappingMatrix orthogonal_retraction(const MappingMatrix& m, const RetractionConfig& config) {
  const Matrix& w = m.w;
  return {(1.0 + config.beta) * w - config.beta * ((w * w.transpose()) * w)};
}

MappingMatrix retract_until(MappingMatrix m, const RetractionConfig& config, double tol,
                            int max_iterations) {
  for (int i = 0; i < max_iterations && orthogonality_error(m) > tol; ++i) {
    m = orthogonal_retraction(m, config);
  }
  return m;
}

}  // namespace bli
