#pragma once
// Small statistics toolbox used by the test harness: two-sample KS,
// chi-square goodness of fit, log-log slope fits, energy-distance
// two-sample tests with permutation calibration.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "bmaps/rng.hpp"

namespace bmaps {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Kolmogorov asymptotic survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
inline double kolmogorov_q(double lambda) {
  if (lambda < 1e-12) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::size_t n = a.size(), m = b.size();
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < n && j < m) {
    double x = std::min(a[i], b[j]);
    while (i < n && a[i] <= x) ++i;
    while (j < m && b[j] <= x) ++j;
    d = std::max(d, std::fabs(double(i) / n - double(j) / m));
  }
  double ne = std::sqrt(double(n) * double(m) / double(n + m));
  KsResult r;
  r.statistic = d;
  r.p_value = kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
  return r;
}

namespace detail {
inline double gamma_p_series(double a, double x) {
  double ap = a, sum = 1.0 / a, del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}
inline double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}
}  // namespace detail

// Regularized upper incomplete gamma Q(a, x).
inline double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - detail::gamma_p_series(a, x);
  return detail::gamma_q_contfrac(a, x);
}

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

// Goodness of fit against given expected counts (already scaled to the sample
// size). dof_reduction subtracts fitted-parameter count plus one.
inline ChiSquareResult chi_square_test(const std::vector<double>& observed,
                                       const std::vector<double>& expected,
                                       int dof_reduction = 1) {
  if (observed.size() != expected.size() || observed.empty())
    throw std::invalid_argument("chi_square_test: size mismatch");
  ChiSquareResult r;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) throw std::invalid_argument("chi_square_test: nonpositive expected");
    double d = observed[i] - expected[i];
    r.statistic += d * d / expected[i];
  }
  r.dof = static_cast<int>(observed.size()) - dof_reduction;
  if (r.dof < 1) r.dof = 1;
  r.p_value = gamma_q(0.5 * r.dof, 0.5 * r.statistic);
  return r;
}

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

inline SlopeFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("least_squares: need >= 3 points");
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = y[i] - (f.intercept + f.slope * x[i]);
    rss += e * e;
  }
  f.slope_stderr = std::sqrt(rss / (double(n) - 2.0) / sxx);
  return f;
}

// Fit y ~ c * x^s on log-log scale over pairs with positive coordinates.
inline SlopeFit loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  return least_squares(lx, ly);
}

// --- energy distance between samples of d-dimensional vectors ---

inline double euclid(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

// Two-sample energy statistic: 2 E|X-Y| - E|X-X'| - E|Y-Y'| (nonnegative,
// zero iff equal laws).
inline double energy_distance(const std::vector<std::vector<double>>& xs,
                              const std::vector<std::vector<double>>& ys) {
  const std::size_t n = xs.size(), m = ys.size();
  if (n < 2 || m < 2) throw std::invalid_argument("energy_distance: need >= 2 per sample");
  double cross = 0.0, within_x = 0.0, within_y = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) cross += euclid(xs[i], ys[j]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) within_x += euclid(xs[i], xs[j]);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) within_y += euclid(ys[i], ys[j]);
  return 2.0 * cross / (double(n) * m) - 2.0 * within_x / (double(n) * n) -
         2.0 * within_y / (double(m) * m);
}

struct EnergyTestResult {
  double statistic = 0.0;       // scaled: nm/(n+m) * energy distance
  double p_value = 1.0;         // permutation p-value
  double null_quantile = 0.0;   // (1 - alpha) quantile of permutation null
};

// Permutation two-sample test on the scaled energy statistic.
inline EnergyTestResult energy_test(const std::vector<std::vector<double>>& xs,
                                    const std::vector<std::vector<double>>& ys, Rng rng,
                                    int permutations = 200, double alpha = 0.01) {
  const std::size_t n = xs.size(), m = ys.size();
  auto scaled = [&](const std::vector<std::vector<double>>& a,
                    const std::vector<std::vector<double>>& b) {
    return double(a.size()) * b.size() / double(a.size() + b.size()) * energy_distance(a, b);
  };
  EnergyTestResult r;
  r.statistic = scaled(xs, ys);
  std::vector<const std::vector<double>*> pool;
  pool.reserve(n + m);
  for (const auto& v : xs) pool.push_back(&v);
  for (const auto& v : ys) pool.push_back(&v);
  std::vector<double> null_stats;
  null_stats.reserve(permutations);
  int ge = 0;
  for (int p = 0; p < permutations; ++p) {
    for (std::size_t i = pool.size(); i > 1; --i) std::swap(pool[i - 1], pool[rng.below(i)]);
    std::vector<std::vector<double>> a, b;
    a.reserve(n);
    b.reserve(m);
    for (std::size_t i = 0; i < n; ++i) a.push_back(*pool[i]);
    for (std::size_t i = n; i < n + m; ++i) b.push_back(*pool[i]);
    double s = scaled(a, b);
    null_stats.push_back(s);
    if (s >= r.statistic) ++ge;
  }
  r.p_value = (ge + 1.0) / (permutations + 1.0);
  std::sort(null_stats.begin(), null_stats.end());
  std::size_t q = static_cast<std::size_t>(std::ceil((1.0 - alpha) * permutations));
  if (q >= null_stats.size()) q = null_stats.size() - 1;
  r.null_quantile = null_stats[q];
  return r;
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

inline double variance_of(const std::vector<double>& v) {
  double m = mean_of(v), s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / double(v.size() - 1);
}

}  // namespace bmaps
