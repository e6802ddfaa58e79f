#include "mwp/stats.h"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mwp {
namespace {

// Modified Lentz evaluation of the continued fraction for I_x(a, b).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
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
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) return h;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) throw std::invalid_argument("regularized_incomplete_beta: a and b must be positive");
  if (!(x >= 0 && x <= 1)) throw std::invalid_argument("regularized_incomplete_beta: x must be in [0, 1]");
  if (x == 0) return 0;
  if (x == 1) return 1;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0)) throw std::invalid_argument("student_t: df must be positive");
  if (std::isinf(t)) return 0;
  return regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

double student_t_cdf(double t, double df) {
  const double tail = student_t_two_sided_p(t, df) / 2.0;
  return t >= 0 ? 1.0 - tail : tail;
}

TTestResult paired_t_test(const std::vector<double>& diffs) {
  const std::size_t n = diffs.size();
  if (n < 2) throw std::invalid_argument("paired_t_test: need at least two pairs");
  TTestResult r;
  double sum = 0;
  for (double d : diffs) sum += d;
  r.mean = sum / static_cast<double>(n);
  double ss = 0;
  for (double d : diffs) ss += (d - r.mean) * (d - r.mean);
  r.sd = std::sqrt(ss / static_cast<double>(n - 1));
  r.df = static_cast<int>(n - 1);
  if (r.sd == 0) {
    r.t = 0;
    r.p = r.mean == 0 ? 1.0 : 0.0;
    return r;
  }
  r.t = r.mean / (r.sd / std::sqrt(static_cast<double>(n)));
  r.p = student_t_two_sided_p(r.t, r.df);
  return r;
}

}  // namespace mwp
