#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace reuse {

struct CorrelationResult {
  double r = 0.0;
  double p = 1.0;
  size_t n = 0;
};

struct SpearmanOptions {
  size_t permutations = 10000;  // permutation test shuffles for small n
  size_t t_approx_min_n = 30;   // use the t approximation at or above this n
  uint64_t seed = 0x2545f4914f6cdd1dULL;
};

// Average ranks (1-based); tied values share the mean of their rank block.
std::vector<double> midranks(std::span<const double> values);

// Spearman rank correlation with midrank ties.  p is two-sided: a Student-t
// approximation for n >= t_approx_min_n, otherwise a seeded permutation
// test.  Throws InsufficientData (n < 3) and DegenerateInput (all xs or all
// ys tied).
CorrelationResult spearman(std::span<const double> xs, std::span<const double> ys,
                           const SpearmanOptions& opts = {});

// Quantile with linear interpolation between order statistics (the value at
// rank (n-1)*q).  v must be sorted ascending and non-empty.
double sorted_quantile(std::span<const double> sorted_values, double q);

// Regularized incomplete beta I_x(a, b); used for Student-t tail areas.
double regularized_incomplete_beta(double a, double b, double x);

// Two-sided p-value for a Student-t statistic with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

}  // namespace reuse
