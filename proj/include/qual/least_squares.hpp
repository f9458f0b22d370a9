#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace qual {

struct DesignMatrix {
  Eigen::MatrixXd values;           // rows x terms
  std::vector<std::string> labels;  // one per term, unique
};

struct LeastSquaresSolution {
  Eigen::VectorXd coefficients;     // one per term
  Eigen::VectorXd residuals;        // y - X b
  Eigen::Index residualDf = 0;      // rows - terms
  double sigma2 = 0.0;              // residual mean square (0 when df = 0)
  Eigen::VectorXd covarianceScale;  // diag((X'X)^-1); SE_j = sqrt(sigma2 * scale_j)
  std::vector<std::string> labels;
};

// Householder QR with column pivoting; stable against badly scaled columns
// (natural units next to coded units). A pivot below 1e-10 times the
// largest pivot raises a rank error naming the dependent column.
LeastSquaresSolution solveLeastSquares(const DesignMatrix& design,
                                       const Eigen::VectorXd& y);

}  // namespace qual
