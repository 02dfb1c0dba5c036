#pragma once

// Independent reference implementations used by the tests. They favour
// obviousness over speed and share no code with the library.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

/// S_q(n, t) computed literally: cut x into floor(n / floor(t)) blocks of
/// length floor(t), average |block sum|^q.
inline double partition_function(const std::vector<double>& x, double q, double t) {
  const auto len = static_cast<std::size_t>(std::floor(t));
  const std::size_t blocks = x.size() / len;
  long double acc = 0.0L;
  for (std::size_t i = 0; i < blocks; ++i) {
    long double s = 0.0L;
    for (std::size_t j = 0; j < len; ++j) s += x[i * len + j];
    acc += std::pow(std::fabs(s), static_cast<long double>(q));
  }
  return static_cast<double>(acc / static_cast<long double>(blocks));
}

inline double normal_cdf(double x, double mean, double sd) {
  return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
}

/// Density of the scaled Student law with location mu, scale delta and nu
/// degrees of freedom in the parameterization where the variance is
/// delta^2 / (nu - 2).
inline double student_pdf(double x, double nu, double delta, double mu) {
  const double z = (x - mu) / delta;
  const double c = std::exp(std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2)) / (delta * std::sqrt(std::numbers::pi));
  return c * std::pow(1.0 + z * z, -(nu + 1) / 2);
}

/// CDF of the same law by composite Simpson integration from the centre.
inline double student_cdf(double x, double nu, double delta, double mu) {
  const double a = mu;
  const double b = x;
  if (a == b) return 0.5;
  // Substitute u = atan((y - mu)/delta) to map the integrand onto a compact range.
  const double ua = 0.0;
  const double ub = std::atan((b - mu) / delta);
  auto g = [&](double u) {
    const double y = mu + delta * std::tan(u);
    const double dy = delta / (std::cos(u) * std::cos(u));
    return student_pdf(y, nu, delta, mu) * dy;
  };
  const int m = 2000;
  const double h = (ub - ua) / m;
  double s = g(ua) + g(ub);
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * g(ua + i * h);
  return 0.5 + s * h / 3.0;
}

/// Two-sided Kolmogorov-Smirnov distance of a sample to a continuous CDF.
inline double ks_distance(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace oracle
