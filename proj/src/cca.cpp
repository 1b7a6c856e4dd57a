#include "mindchat/cca.hpp"

#include <algorithm>
#include <cmath>

#include "mindchat/error.hpp"

namespace mindchat {

CcaSubspace::CcaSubspace(const Eigen::MatrixXd& x) {
  if (x.rows() < 1 || x.cols() < 2) {
    throw Error(ErrorCode::kDegenerateInput, "need >= 1 row and >= 2 samples");
  }
  if (!x.allFinite()) throw Error(ErrorCode::kDegenerateInput, "non-finite input");
  const Eigen::MatrixXd centered = x.colwise() - x.rowwise().mean();
  const Eigen::VectorXd row_norms = centered.rowwise().norm();
  const double largest = row_norms.maxCoeff();
  if (largest == 0.0 || row_norms.minCoeff() <= 1e-12 * largest) {
    throw Error(ErrorCode::kDegenerateInput, "zero-variance row");
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered.transpose(),
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < s.size() && s[rank] > 1e-10 * s[0]) ++rank;
  basis_ = svd.matrixU().leftCols(rank);
  to_weights_ = svd.matrixV().leftCols(rank) * s.head(rank).cwiseInverse().asDiagonal();
}

CcaResult Cca(const CcaSubspace& x, const CcaSubspace& y) {
  if (x.samples() != y.samples()) {
    throw Error(ErrorCode::kShapeMismatch, "sample counts differ");
  }
  const Eigen::MatrixXd cross = x.basis().transpose() * y.basis();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross, Eigen::ComputeThinU | Eigen::ComputeThinV);
  CcaResult result;
  result.rho = std::clamp(svd.singularValues()[0], 0.0, 1.0);
  result.x_weights = x.to_weights() * svd.matrixU().col(0);
  result.y_weights = y.to_weights() * svd.matrixV().col(0);
  return result;
}

double CcaCorr(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (x.cols() != y.cols()) throw Error(ErrorCode::kShapeMismatch, "sample counts differ");
  return Cca(CcaSubspace(x), CcaSubspace(y)).rho;
}

double Pearson(const Eigen::Ref<const Eigen::RowVectorXd>& a,
               const Eigen::Ref<const Eigen::RowVectorXd>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kShapeMismatch, "lengths differ");
  const Eigen::RowVectorXd ca = a.array() - a.mean();
  const Eigen::RowVectorXd cb = b.array() - b.mean();
  const double denom = ca.norm() * cb.norm();
  if (denom == 0.0) return 0.0;
  return ca.dot(cb) / denom;
}

double PearsonFlat(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::kShapeMismatch, "shapes differ");
  }
  return Pearson(a.reshaped().transpose(), b.reshaped().transpose());
}

}  // namespace mindchat
