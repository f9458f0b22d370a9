#pragma once

namespace qual {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation with
// the standard symmetry switch. Absolute error below 1e-12 for a, b <= 1e4.
double regularizedIncompleteBeta(double a, double b, double x);

// Two-sided p-value of a Student t statistic: I_{df/(df+t^2)}(df/2, 1/2).
double tTwoSidedP(double t, double df);

// Upper-tail p-value of an F statistic.
double fUpperP(double f, double df1, double df2);

}  // namespace qual
