#include <doctest.h>

#include <cmath>

#include "qual/errors.hpp"
#include "qual/least_squares.hpp"
#include "qual/random.hpp"

using namespace qual;

namespace {

DesignMatrix randomDesign(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  DesignMatrix design;
  design.values.resize(rows, cols);
  design.values.col(0).setOnes();
  for (Eigen::Index j = 1; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      design.values(i, j) = rng.uniform(-3.0, 3.0);
    }
  }
  design.labels.push_back("(intercept)");
  for (Eigen::Index j = 1; j < cols; ++j) {
    design.labels.push_back("x" + std::to_string(j));
  }
  return design;
}

}  // namespace

TEST_CASE("a lone intercept column recovers the mean") {
  DesignMatrix design;
  design.values = Eigen::MatrixXd::Ones(3, 1);
  design.labels = {"(intercept)"};
  Eigen::VectorXd y(3);
  y << 3, 3, 3;
  const auto sol = solveLeastSquares(design, y);
  CHECK(sol.coefficients[0] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(sol.residuals.norm() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(sol.residualDf == 2);
}

TEST_CASE("an exactly linear response leaves no residual") {
  Rng rng(41);
  const auto design = randomDesign(rng, 12, 4);
  Eigen::VectorXd truth(4);
  truth << 0.5, -1.0, 2.0, 0.25;
  const Eigen::VectorXd y = design.values * truth;
  const auto sol = solveLeastSquares(design, y);
  CHECK(sol.residuals.lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK((sol.coefficients - truth).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("a duplicated column raises a rank error naming a dependent column") {
  Rng rng(42);
  DesignMatrix design = randomDesign(rng, 10, 3);
  design.values.conservativeResize(Eigen::NoChange, 4);
  design.values.col(3) = design.values.col(2);
  design.labels.push_back("x2_copy");
  Eigen::VectorXd y(10);
  for (int i = 0; i < 10; ++i) y[i] = rng.uniform();
  CHECK_THROWS_WITH_AS(solveLeastSquares(design, y), doctest::Contains("x2"),
                       RankError);
}

TEST_CASE("underdetermined systems are rejected") {
  Rng rng(43);
  const auto design = randomDesign(rng, 3, 4);
  Eigen::VectorXd y(3);
  y << 1, 2, 3;
  CHECK_THROWS_AS(solveLeastSquares(design, y), RankError);
}

TEST_CASE("residuals are orthogonal to every model column") {
  Rng rng(44);
  for (int trial = 0; trial < 20; ++trial) {
    const auto design = randomDesign(rng, 15, 5);
    Eigen::VectorXd y(15);
    for (int i = 0; i < 15; ++i) y[i] = rng.uniform(-2, 2);
    const auto sol = solveLeastSquares(design, y);
    for (Eigen::Index j = 0; j < 5; ++j) {
      const double inner = design.values.col(j).dot(sol.residuals);
      CHECK(std::fabs(inner) <
            1e-9 * design.values.col(j).norm() *
                std::max(sol.residuals.norm(), 1.0));
    }
  }
}

TEST_CASE("covariance scale matches the dense normal-equation inverse") {
  Rng rng(45);
  for (int trial = 0; trial < 10; ++trial) {
    const auto design = randomDesign(rng, 20, 6);
    Eigen::VectorXd y(20);
    for (int i = 0; i < 20; ++i) y[i] = rng.uniform(-1, 1);
    const auto sol = solveLeastSquares(design, y);
    // independent route: dense inverse of X'X
    const Eigen::MatrixXd xtx = design.values.transpose() * design.values;
    const Eigen::MatrixXd inv = xtx.fullPivLu().inverse();
    for (Eigen::Index j = 0; j < 6; ++j) {
      CHECK(sol.covarianceScale[j] ==
            doctest::Approx(inv(j, j)).epsilon(1e-8));
    }
  }
}

TEST_CASE("coefficients are stable under positive column rescaling") {
  Rng rng(46);
  const auto design = randomDesign(rng, 18, 4);
  Eigen::VectorXd y(18);
  for (int i = 0; i < 18; ++i) y[i] = rng.uniform(-1, 1);
  const auto base = solveLeastSquares(design, y);

  DesignMatrix scaled = design;
  const double s = 2000.0;  // natural-units column next to coded ones
  scaled.values.col(2) *= s;
  const auto rescaled = solveLeastSquares(scaled, y);
  CHECK(rescaled.coefficients[2] * s ==
        doctest::Approx(base.coefficients[2]).epsilon(1e-9));
  CHECK(rescaled.coefficients[1] ==
        doctest::Approx(base.coefficients[1]).epsilon(1e-9));
  CHECK(rescaled.sigma2 == doctest::Approx(base.sigma2).epsilon(1e-9));
}

TEST_CASE("sigma2 is the residual mean square") {
  Rng rng(47);
  const auto design = randomDesign(rng, 9, 3);
  Eigen::VectorXd y(9);
  for (int i = 0; i < 9; ++i) y[i] = rng.uniform(-1, 1);
  const auto sol = solveLeastSquares(design, y);
  CHECK(sol.residualDf == 6);
  CHECK(sol.sigma2 ==
        doctest::Approx(sol.residuals.squaredNorm() / 6.0).epsilon(1e-14));
}
