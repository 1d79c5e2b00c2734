#pragma once

#include <span>

namespace grf {

// Regularized incomplete beta I_x(a, b), evaluated by the modified Lentz
// continued fraction (switching to 1 - I_{1-x}(b, a) past the mean where the
// fraction converges slowly). Accurate to ~1e-14 relative.
double regularized_incomplete_beta(double x, double a, double b);

// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
double student_t_two_sided_p(double t, double df);

struct TTestResult {
  double t_statistic = 0.0;
  double p_value = 1.0;
};

// Paired t-test on a - b with n - 1 degrees of freedom. Zero-variance
// differences give p = 1 when the mean difference is 0 (t = 0) and p = 0
// otherwise (t = +/-inf). Throws length-mismatch, or invalid-argument for n < 2.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace grf
