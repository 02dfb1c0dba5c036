#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "heavytail/detail/compensated_sum.hpp"
#include "heavytail/errors.hpp"
#include "heavytail/partition.hpp"
#include "heavytail/time_series.hpp"

namespace heavytail {

inline constexpr int kDefaultRegressionPoints = 5;
inline constexpr double kDefaultQMax = 12.0;
inline constexpr int kDefaultQCount = 40;

/// Tail index, moment order and block-growth exponent of the rate function.
struct RateParams {
  double alpha = 1.0;
  double q = 1.0;
  double s = 0.5;

  void validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) detail::domain_fail("RateParams", "alpha must be positive");
    if (!(q > 0.0) || !std::isfinite(q)) detail::domain_fail("RateParams", "q must be positive");
    if (!(s > 0.0 && s < 1.0)) detail::domain_fail("RateParams", "s must lie in (0, 1)");
  }
};

/// In-probability limit of ln S_q(n, n^s) / ln n for data with tail index alpha.
///
/// Ties resolve to the q <= alpha and alpha <= 2 branches; the function is
/// continuous across both boundaries so the choice only fixes determinism.
inline double rate_function(const RateParams& p) {
  p.validate();
  const auto [alpha, q, s] = p;
  if (alpha <= 2.0) return q <= alpha ? s * q / alpha : s + q / alpha - 1.0;
  if (q <= alpha) return s * q / 2.0;
  return std::max(s + q / alpha - 1.0, s * q / 2.0);
}

/// Closed-form limit of the empirical scaling function as n -> inf, then N -> inf.
inline double asymptotic_tau(double alpha, double q) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) detail::domain_fail("asymptotic_tau", "alpha must be positive");
  if (!(q > 0.0) || !std::isfinite(q)) detail::domain_fail("asymptotic_tau", "q must be positive");
  if (alpha <= 2.0) return q <= alpha ? q / alpha : 1.0;
  if (q <= alpha) return q / 2.0;
  // q > alpha > 2, so q - 2 > 0.
  if (!(q > 2.0)) throw std::logic_error("asymptotic_tau: reached q <= 2 in the q > alpha > 2 branch");
  const double d = alpha - q;
  const double qm2 = 2.0 - q;
  return q / 2.0 + 2.0 * d * d * (2.0 * alpha + 4.0 * q - 3.0 * alpha * q) / (alpha * alpha * alpha * qm2 * qm2);
}

/// Location of the kink of max{s + q/alpha - 1, s q / 2} when it falls in (0, 1).
inline std::optional<double> rate_kink(double alpha, double q) {
  if (alpha <= 2.0 || q <= alpha) return std::nullopt;
  const double s_star = 2.0 * (q - alpha) / (alpha * (q - 2.0));
  if (s_star > 0.0 && s_star < 1.0) return s_star;
  return std::nullopt;
}

namespace detail {

template <class F>
double simpson(F&& f, double a, double b, int intervals) {
  if (intervals % 2 != 0) ++intervals;
  const double h = (b - a) / intervals;
  CompensatedSum acc;
  acc += f(a);
  acc += f(b);
  for (int i = 1; i < intervals; ++i) acc += (i % 2 == 1 ? 4.0 : 2.0) * f(a + i * h);
  return acc.value() * h / 3.0;
}

}  // namespace detail

/// Scaling-function limit computed as the continuous regression slope
///   (int s R ds - int s ds * int R ds) / (int s^2 ds - (int s ds)^2)
///     = 12 int s R ds - 6 int R ds
/// by composite Simpson quadrature, splitting [0, 1] at the kink of R.
/// Independent of asymptotic_tau; used to cross-check it.
inline double tau_by_integration(double alpha, double q, int num_points = 10000) {
  if (!(alpha > 0.0) || !(q > 0.0)) detail::domain_fail("tau_by_integration", "alpha and q must be positive");
  if (num_points < 100) detail::domain_fail("tau_by_integration", "num_points must be >= 100");

  // R(q, s) extended continuously to s in [0, 1].
  auto R = [alpha, q](double s) {
    if (alpha <= 2.0) return q <= alpha ? s * q / alpha : s + q / alpha - 1.0;
    if (q <= alpha) return s * q / 2.0;
    return std::max(s + q / alpha - 1.0, s * q / 2.0);
  };
  auto sR = [&R](double s) { return s * R(s); };

  std::vector<double> knots{0.0};
  if (auto k = rate_kink(alpha, q)) knots.push_back(*k);
  knots.push_back(1.0);

  detail::CompensatedSum int_r;
  detail::CompensatedSum int_sr;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    int_r += detail::simpson(R, knots[i], knots[i + 1], num_points);
    int_sr += detail::simpson(sR, knots[i], knots[i + 1], num_points);
  }
  return 12.0 * int_sr.value() - 6.0 * int_r.value();
}

/// Ordinary least-squares fit y = a + b x.
struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  std::size_t points = 0;
};

inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_line: size mismatch");
  if (x.size() < 2) throw EstimationError("fit_line: need at least 2 points");
  const auto m = static_cast<double>(x.size());
  detail::CompensatedSum sx, sy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx.value() / m;
  const double my = sy.value() / m;
  detail::CompensatedSum sxx, sxy;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx.value() > 0.0)) throw EstimationError("fit_line: regressor has zero variance");
  LinearFit f;
  f.slope = sxy.value() / sxx.value();
  f.intercept = my - f.slope * mx;
  f.points = x.size();
  return f;
}

/// tau_hat_{N,n}(q_i) values over a q grid.
struct ScalingCurve {
  std::vector<double> q_values;
  std::vector<double> tau_hat;
  int N = 0;
  std::size_t n = 0;
  std::vector<std::size_t> skipped_cells;  // per q, invalid grid cells left out of the fit

  [[nodiscard]] std::size_t size() const noexcept { return q_values.size(); }
  [[nodiscard]] std::size_t total_skipped() const noexcept {
    std::size_t t = 0;
    for (auto c : skipped_cells) t += c;
    return t;
  }
};

namespace detail {

inline LinearFit scaling_row_fit(const PartitionGrid& grid, std::size_t qi) {
  if (qi >= grid.rows()) throw std::out_of_range("empirical_scaling_function: q index out of range");
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(grid.cols());
  ys.reserve(grid.cols());
  for (std::size_t j = 0; j < grid.cols(); ++j) {
    if (!grid.valid(qi, j)) continue;
    xs.push_back(grid.s_values()[j]);
    ys.push_back(grid.cell(qi, j));
  }
  if (xs.size() < 2) {
    throw EstimationError("empirical_scaling_function: fewer than 2 valid cells at q = " +
                          std::to_string(grid.q_values()[qi]));
  }
  return fit_line(xs, ys);
}

}  // namespace detail

/// Slope (with intercept) of ln S_q(n, n^s) / ln n regressed on s for one row
/// of the grid. Invalid cells are dropped.
inline double empirical_scaling_function(const PartitionGrid& grid, std::size_t q_index) {
  return detail::scaling_row_fit(grid, q_index).slope;
}

/// `count` equispaced points on (0, q_max]: q_max/count, 2 q_max/count, ..., q_max.
inline std::vector<double> default_q_grid(double q_max = kDefaultQMax, int count = kDefaultQCount) {
  if (!(q_max > 0.0) || count < 1) detail::domain_fail("default_q_grid", "need q_max > 0 and count >= 1");
  std::vector<double> q(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) q[static_cast<std::size_t>(i)] = q_max * (i + 1) / count;
  return q;
}

inline ScalingCurve scaling_curve_from_grid(const PartitionGrid& grid, int N) {
  ScalingCurve c;
  c.N = N;
  c.n = grid.n();
  c.q_values.assign(grid.q_values().begin(), grid.q_values().end());
  c.tau_hat.reserve(grid.rows());
  c.skipped_cells.reserve(grid.rows());
  for (std::size_t i = 0; i < grid.rows(); ++i) {
    c.tau_hat.push_back(empirical_scaling_function(grid, i));
    c.skipped_cells.push_back(grid.invalid_count(i));
  }
  return c;
}

/// Empirical scaling function of a sample over a q grid.
inline ScalingCurve build_scaling_curve(const TimeSeries& x, std::span<const double> q_values,
                                        int N = kDefaultRegressionPoints) {
  return scaling_curve_from_grid(build_partition_grid(x, q_values, N), N);
}

}  // namespace heavytail
