// Student-t distribution and the paired t-test.
#pragma once

#include <vector>

namespace mwp {

// I_x(a, b) by continued fraction. Requires a, b > 0 and 0 <= x <= 1.
double regularized_incomplete_beta(double a, double b, double x);

double student_t_cdf(double t, double df);

// P(|T| >= |t|).
double student_t_two_sided_p(double t, double df);

struct TTestResult {
  double mean = 0;
  double sd = 0;  // sample standard deviation, n - 1 denominator
  double t = 0;   // 0 when sd == 0
  int df = 0;
  double p = 1;
};

// Two-sided one-sample test of mean(diffs) == 0. When sd == 0, p is 1 for a
// zero mean and 0 otherwise. Throws std::invalid_argument when n < 2.
TTestResult paired_t_test(const std::vector<double>& diffs);

}  // namespace mwp
