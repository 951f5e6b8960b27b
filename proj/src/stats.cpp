#include "reuse/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "reuse/errors.hpp"

namespace reuse {

namespace {

bool all_tied(std::span<const double> v) {
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i] != v[0]) return false;
  return true;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  const size_t n = xs.size();
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Continued-fraction helper for the regularized incomplete beta (the
// standard Lentz iteration).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

std::vector<double> midranks(std::span<const double> values) {
  const size_t n = values.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&values](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

double sorted_quantile(std::span<const double> v, double q) {
  if (v.empty()) throw InvalidArgument("quantile of empty data");
  q = std::clamp(q, 0.0, 1.0);
  const double idx = q * static_cast<double>(v.size() - 1);
  const size_t lo = static_cast<size_t>(idx);
  const size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = idx - static_cast<double>(lo);
  return v[lo] + (v[hi] - v[lo]) * frac;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  // Use the continued fraction on the side where it converges fast.
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!std::isfinite(t)) return 0.0;
  const double x = df / (df + t * t);
  double p = regularized_incomplete_beta(df / 2.0, 0.5, x);
  return std::clamp(p, 0.0, 1.0);
}

CorrelationResult spearman(std::span<const double> xs, std::span<const double> ys,
                           const SpearmanOptions& opts) {
  if (xs.size() != ys.size())
    throw InvalidArgument("correlation inputs have different lengths");
  const size_t n = xs.size();
  if (n < 3) throw InsufficientData("need at least 3 points for correlation");
  if (all_tied(xs)) throw DegenerateInput("all x values tied");
  if (all_tied(ys)) throw DegenerateInput("all y values tied");

  const auto rx = midranks(xs);
  const auto ry = midranks(ys);
  const double r = pearson(rx, ry);

  CorrelationResult result;
  result.r = r;
  result.n = n;

  if (n >= opts.t_approx_min_n) {
    const double r2 = std::min(r * r, 1.0);
    if (r2 >= 1.0) {
      result.p = 1e-300;  // perfectly monotone; tail mass below representable
    } else {
      const double t = r * std::sqrt((static_cast<double>(n) - 2.0) / (1.0 - r2));
      result.p = std::max(student_t_two_sided_p(t, static_cast<double>(n) - 2.0), 1e-300);
    }
    return result;
  }

  // Small n: seeded permutation test on the ranks, two-sided.
  std::mt19937_64 rng(opts.seed);
  std::vector<double> shuffled(ry);
  const double target = std::fabs(r) - 1e-12;
  size_t hits = 0;
  for (size_t it = 0; it < opts.permutations; ++it) {
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    if (std::fabs(pearson(rx, shuffled)) >= target) ++hits;
  }
  result.p = static_cast<double>(hits + 1) / static_cast<double>(opts.permutations + 1);
  return result;
}

}  // namespace reuse
