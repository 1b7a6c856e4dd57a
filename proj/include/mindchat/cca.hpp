#pragma once

#include <Eigen/Dense>

namespace mindchat {

// Orthonormal basis of the centered row space of a (variables x samples)
// matrix, plus the map from basis coordinates back to variable weights.
// Rank-deficient inputs are handled by dropping null directions.
class CcaSubspace {
 public:
  // Throws Error(kDegenerateInput) when any row has zero variance.
  explicit CcaSubspace(const Eigen::MatrixXd& x);

  // samples x rank, orthonormal columns.
  const Eigen::MatrixXd& basis() const { return basis_; }
  // variables x rank; w = to_weights * u projects centered x onto basis * u.
  const Eigen::MatrixXd& to_weights() const { return to_weights_; }
  Eigen::Index samples() const { return basis_.rows(); }
  Eigen::Index rank() const { return basis_.cols(); }

 private:
  Eigen::MatrixXd basis_;
  Eigen::MatrixXd to_weights_;
};

struct CcaResult {
  double rho = 0.0;
  Eigen::VectorXd x_weights;
  Eigen::VectorXd y_weights;
};

// Leading canonical pair; throws Error(kShapeMismatch) on unequal sample counts.
CcaResult Cca(const CcaSubspace& x, const CcaSubspace& y);

// Largest canonical correlation between the row spaces of x and y, in [0, 1].
double CcaCorr(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

// Pearson correlation of two equal-length series; 0 when either is constant.
double Pearson(const Eigen::Ref<const Eigen::RowVectorXd>& a,
               const Eigen::Ref<const Eigen::RowVectorXd>& b);

// Pearson correlation of two equally shaped matrices treated as flat vectors.
double PearsonFlat(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace mindchat
