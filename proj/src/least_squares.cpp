#include "qual/least_squares.hpp"

#include <cmath>

#include "qual/errors.hpp"

namespace qual {

LeastSquaresSolution solveLeastSquares(const DesignMatrix& design,
                                       const Eigen::VectorXd& y) {
  const Eigen::Index rows = design.values.rows();
  const Eigen::Index cols = design.values.cols();
  if (rows != y.size()) {
    throw RankError("design has " + std::to_string(rows) +
                    " rows but response has " + std::to_string(y.size()));
  }
  if (rows < cols) {
    throw RankError("underdetermined system: " + std::to_string(rows) +
                    " rows for " + std::to_string(cols) + " terms");
  }
  if (design.labels.size() != static_cast<std::size_t>(cols)) {
    throw RankError("label count does not match term count");
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.values);
  const Eigen::MatrixXd r =
      qr.matrixR().topLeftCorner(cols, cols).triangularView<Eigen::Upper>();
  const auto& perm = qr.colsPermutation().indices();

  const double largestPivot = std::fabs(r(0, 0));
  for (Eigen::Index k = 0; k < cols; ++k) {
    if (std::fabs(r(k, k)) < 1e-10 * largestPivot) {
      const auto original = static_cast<std::size_t>(perm[k]);
      throw RankError("design is rank deficient: column '" +
                      design.labels[original] + "' is linearly dependent");
    }
  }

  LeastSquaresSolution sol;
  sol.labels = design.labels;
  sol.coefficients = qr.solve(y);
  sol.residuals = y - design.values * sol.coefficients;
  sol.residualDf = rows - cols;
  sol.sigma2 = sol.residualDf > 0
                   ? sol.residuals.squaredNorm() /
                         static_cast<double>(sol.residualDf)
                   : 0.0;

  // diag((X'X)^-1) from R: with X P = Q R, entry j is the squared norm of
  // the row of R^-1 matching column j under the pivot permutation.
  const Eigen::MatrixXd rInv =
      r.triangularView<Eigen::Upper>().solve(
          Eigen::MatrixXd::Identity(cols, cols));
  sol.covarianceScale.resize(cols);
  for (Eigen::Index k = 0; k < cols; ++k) {
    sol.covarianceScale[perm[k]] = rInv.row(k).squaredNorm();
  }
  return sol;
}

}  // namespace qual
