#pragma once

namespace stylelab {

// ---------------------------------------------------------------------------
// Special functions backing the p-values in the stats module. All functions
// accept real-valued (non-integer) degrees of freedom, which sphericity
// corrections require. Absolute accuracy target: 1e-10 over the tested
// domain. Domain violations throw argument_error; non-convergence throws
// numeric_error.
// ---------------------------------------------------------------------------

// I_x(a, b), a > 0, b > 0, 0 <= x <= 1
double regularized_incomplete_beta(double a, double b, double x);

// P(s, x) = gamma(s, x) / Gamma(s), s > 0, x >= 0
double regularized_lower_gamma(double s, double x);

// Q(s, x) = 1 - P(s, x), computed directly for tail accuracy
double regularized_upper_gamma(double s, double x);

// F distribution with df1, df2 > 0; cdf(x <= 0) = 0
double f_cdf(double x, double df1, double df2);

// upper tail of the F distribution, the p-value of an F statistic
double f_survival(double x, double df1, double df2);

// chi-squared distribution with df > 0; cdf(x <= 0) = 0
double chi_squared_cdf(double x, double df);

// upper tail of the chi-squared distribution
double chi_squared_survival(double x, double df);

}  // namespace stylelab
