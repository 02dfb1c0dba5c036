#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "heavytail/detail/compensated_sum.hpp"
#include "heavytail/errors.hpp"
#include "heavytail/scaling.hpp"
#include "heavytail/time_series.hpp"

namespace heavytail {

// ---------------------------------------------------------------------------
// Scaling-function least-squares estimator
// ---------------------------------------------------------------------------

/// Which half of the asymptotic scaling function the fit uses as its model.
enum class Branch { le2, gt2 };
enum class BranchMode { automatic, le2, gt2 };

inline std::string_view to_string(Branch b) { return b == Branch::le2 ? "le2" : "gt2"; }
inline std::string_view to_string(BranchMode m) {
  switch (m) {
    case BranchMode::le2: return "le2";
    case BranchMode::gt2: return "gt2";
    default: return "auto";
  }
}

struct SearchInterval {
  double lo = 0.0;  // exclusive
  double hi = 0.0;  // inclusive
};

inline constexpr SearchInterval kLe2Interval{0.05, 2.0};
inline constexpr SearchInterval kGt2Interval{2.0, 50.0};

struct FitOptions {
  BranchMode mode = BranchMode::automatic;
  SearchInterval le2 = kLe2Interval;
  SearchInterval gt2 = kGt2Interval;
  double grid_step = 0.01;
  double tolerance = 1e-6;
  bool refine = true;  // golden-section refinement after the grid scan
  // Relative SSE gap below which automatic mode reports le2 and flags the
  // result inconclusive.
  double inconclusive_ratio = 0.01;
};

struct TailEstimate {
  double alpha_hat = 0.0;
  Branch branch = Branch::le2;
  double sse = 0.0;
  std::optional<double> branch_sse_other;  // set when both branches were fit
  std::optional<double> alpha_other;
  std::vector<double> q_grid_used;
  bool inconclusive = false;
  bool at_boundary = false;
};

/// Sum of squared residuals between tau_hat and the asymptotic form at alpha.
inline double scaling_fit_sse(std::span<const double> q, std::span<const double> tau_hat, double alpha) {
  detail::CompensatedSum acc;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double r = tau_hat[i] - asymptotic_tau(alpha, q[i]);
    acc += r * r;
  }
  return acc.value();
}

namespace detail {

struct BranchFit {
  double alpha = 0.0;
  double sse = 0.0;
  bool at_boundary = false;
};

// Golden-section search for a minimum of f on [a, b].
template <class F>
std::pair<double, double> golden_section(F&& f, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

// Grid scan with `step` over (lo, hi], then golden-section refinement inside
// the two grid cells adjacent to the best grid point. The objective is only
// piecewise smooth in alpha, so the refined value is kept only if it improves.
template <class F>
BranchFit minimize_on_interval(F&& sse, SearchInterval iv, double step, double tol, bool refine) {
  if (!(iv.hi > iv.lo) || !(step > 0.0)) domain_fail("scaling_fit_estimate", "empty search interval");
  std::vector<double> grid;
  const auto cells = static_cast<long>(std::ceil((iv.hi - iv.lo) / step - 1e-9));
  for (long i = 1; i <= cells; ++i) grid.push_back(std::min(iv.lo + static_cast<double>(i) * step, iv.hi));
  if (grid.empty() || grid.back() < iv.hi) grid.push_back(iv.hi);

  std::size_t best = 0;
  double best_f = sse(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double f = sse(grid[i]);
    if (f < best_f) {
      best_f = f;
      best = i;
    }
  }
  BranchFit out{grid[best], best_f, false};
  if (refine) {
    // Lower bound is exclusive: stay a hair inside it.
    const double left = best == 0 ? iv.lo + std::min(tol, step * 1e-3) : grid[best - 1];
    const double right = best + 1 < grid.size() ? grid[best + 1] : iv.hi;
    const auto [x, f] = golden_section(sse, left, right, tol);
    if (f < out.sse) {
      out.alpha = x;
      out.sse = f;
    }
  }
  const double edge = std::max(10.0 * tol, 1e-9);
  out.at_boundary = (out.alpha - iv.lo) <= edge || (iv.hi - out.alpha) <= edge;
  return out;
}

}  // namespace detail

/// Least-squares fit of the asymptotic scaling function to an empirical curve.
///
/// Automatic mode fits both branches and keeps the one with the smaller SSE;
/// near-ties (relative gap under `inconclusive_ratio`) report le2 with the
/// `inconclusive` flag set.
inline TailEstimate scaling_fit_estimate(std::span<const double> q, std::span<const double> tau_hat,
                                         const FitOptions& opt = {}) {
  if (q.empty() || q.size() != tau_hat.size()) throw EstimationError("scaling_fit_estimate: empty or mismatched curve");
  for (double t : tau_hat) {
    if (!std::isfinite(t)) throw EstimationError("scaling_fit_estimate: non-finite tau_hat");
  }
  if (!(opt.le2.lo >= 0.0) || opt.le2.hi > 2.0) {
    detail::domain_fail("scaling_fit_estimate", "le2 search interval must lie within (0, 2]");
  }
  if (opt.gt2.lo < 2.0) detail::domain_fail("scaling_fit_estimate", "gt2 search interval must lie within (2, inf)");

  auto objective = [&](double a) { return scaling_fit_sse(q, tau_hat, a); };
  auto fit = [&](Branch b) {
    return detail::minimize_on_interval(objective, b == Branch::le2 ? opt.le2 : opt.gt2, opt.grid_step, opt.tolerance,
                                        opt.refine);
  };

  TailEstimate est;
  est.q_grid_used.assign(q.begin(), q.end());
  auto take = [&est](const detail::BranchFit& f, Branch b) {
    est.alpha_hat = f.alpha;
    est.sse = f.sse;
    est.branch = b;
    est.at_boundary = f.at_boundary;
  };

  if (opt.mode == BranchMode::le2) {
    take(fit(Branch::le2), Branch::le2);
  } else if (opt.mode == BranchMode::gt2) {
    take(fit(Branch::gt2), Branch::gt2);
  } else {
    const auto lo = fit(Branch::le2);
    const auto hi = fit(Branch::gt2);
    const double scale = std::max(lo.sse, hi.sse);
    const bool tie = scale == 0.0 || std::abs(lo.sse - hi.sse) < opt.inconclusive_ratio * scale;
    if (tie || lo.sse <= hi.sse) {
      take(lo, Branch::le2);
      est.branch_sse_other = hi.sse;
      est.alpha_other = hi.alpha;
    } else {
      take(hi, Branch::gt2);
      est.branch_sse_other = lo.sse;
      est.alpha_other = lo.alpha;
    }
    est.inconclusive = tie;
  }
  return est;
}

inline TailEstimate scaling_fit_estimate(const ScalingCurve& curve, const FitOptions& opt = {}) {
  return scaling_fit_estimate(curve.q_values, curve.tau_hat, opt);
}

// ---------------------------------------------------------------------------
// Order-statistics estimators
// ---------------------------------------------------------------------------

/// Order-statistics estimators work on raw values unless asked to take |X|.
enum class ValueTransform { raw, absolute };

/// Descending order statistics X_(1) >= X_(2) >= ... >= X_(n).
class OrderStatistics {
 public:
  explicit OrderStatistics(const TimeSeries& x, ValueTransform t = ValueTransform::raw)
      : sorted_(x.values().begin(), x.values().end()) {
    if (t == ValueTransform::absolute) {
      for (double& v : sorted_) v = std::abs(v);
    }
    std::sort(sorted_.begin(), sorted_.end(), std::greater<>());
  }

  [[nodiscard]] std::size_t size() const noexcept { return sorted_.size(); }
  /// 1-based, as in X_(i).
  [[nodiscard]] double operator()(std::size_t i) const { return sorted_.at(i - 1); }

  // H^(r)_k = (1/k) sum_{i<=k} ln(X_(i) / X_(k+1))^r for r = 1, 2.
  struct LogMoments {
    double h1 = 0.0;
    double h2 = 0.0;
  };

  [[nodiscard]] LogMoments log_moments(std::size_t k, const char* where) const {
    if (k < 1 || k + 1 > sorted_.size()) detail::domain_fail(where, "need 1 <= k <= n - 1");
    const double ref = sorted_[k];
    if (!(ref > 0.0)) detail::domain_fail(where, "X_(k+1) must be strictly positive");
    const double log_ref = std::log(ref);
    detail::CompensatedSum s1, s2;
    for (std::size_t i = 0; i < k; ++i) {
      const double l = std::log(sorted_[i]) - log_ref;
      s1 += l;
      s2 += l * l;
    }
    const auto kd = static_cast<double>(k);
    return {s1.value() / kd, s2.value() / kd};
  }

 private:
  std::vector<double> sorted_;
};

inline double hill_estimate(const OrderStatistics& os, std::size_t k) {
  const auto m = os.log_moments(k, "hill_estimate");
  if (!(m.h1 > 0.0)) detail::domain_fail("hill_estimate", "top k+1 order statistics are all equal");
  return 1.0 / m.h1;
}

/// Hill estimator of the tail index from the k largest observations.
inline double hill_estimate(const TimeSeries& x, std::size_t k, ValueTransform t = ValueTransform::raw) {
  return hill_estimate(OrderStatistics(x, t), k);
}

/// `standard` is the Dekkers-Einmahl-de Haan estimator. `as_printed` swaps the
/// ratio inside the correction term to (H2)^2 / H1; kept for comparison only.
enum class MomentFormula { standard, as_printed };

struct MomentEstimate {
  double gamma = 0.0;             // extreme value index
  std::optional<double> alpha;    // 1 / gamma when gamma > 0
  double h1 = 0.0;
  double h2 = 0.0;
};

inline MomentEstimate moment_estimate(const OrderStatistics& os, std::size_t k,
                                      MomentFormula formula = MomentFormula::standard) {
  if (k < 2) detail::domain_fail("moment_estimate", "need k >= 2");
  const auto m = os.log_moments(k, "moment_estimate");
  MomentEstimate r{0.0, std::nullopt, m.h1, m.h2};
  if (formula == MomentFormula::standard) {
    if (!(m.h2 > 0.0)) detail::domain_fail("moment_estimate", "H2 is zero");
    const double denom = 1.0 - m.h1 * m.h1 / m.h2;
    if (denom == 0.0) detail::domain_fail("moment_estimate", "H1^2 equals H2 (zero denominator)");
    r.gamma = m.h1 + 1.0 - 0.5 / denom;
  } else {
    if (!(m.h1 > 0.0)) detail::domain_fail("moment_estimate", "H1 is zero");
    const double denom = m.h2 * m.h2 / m.h1 - 1.0;
    if (denom == 0.0) detail::domain_fail("moment_estimate", "(H2)^2 / H1 equals 1 (zero denominator)");
    r.gamma = 1.0 + m.h1 + 0.5 / denom;
  }
  if (!std::isfinite(r.gamma)) detail::domain_fail("moment_estimate", "non-finite estimate");
  if (r.gamma > 0.0) r.alpha = 1.0 / r.gamma;
  return r;
}

/// Moment (Dekkers-Einmahl-de Haan) estimator of the extreme value index.
inline MomentEstimate moment_estimate(const TimeSeries& x, std::size_t k, ValueTransform t = ValueTransform::raw,
                                      MomentFormula formula = MomentFormula::standard) {
  return moment_estimate(OrderStatistics(x, t), k, formula);
}

struct QQPoint {
  double exponential_quantile = 0.0;  // -ln(i / (k + 1))
  double log_value = 0.0;             // ln X_(i)
};

/// QQ plot of log data on exponential quantiles; k = n gives the Zipf plot.
inline std::vector<QQPoint> qq_points(const TimeSeries& x, std::size_t k, ValueTransform t = ValueTransform::raw) {
  const OrderStatistics os(x, t);
  if (k < 1 || k > os.size()) detail::domain_fail("qq_points", "need 1 <= k <= n");
  std::vector<QQPoint> pts;
  pts.reserve(k);
  const auto kp1 = static_cast<double>(k + 1);
  for (std::size_t i = 1; i <= k; ++i) {
    const double v = os(i);
    if (!(v > 0.0)) detail::domain_fail("qq_points", "top k values must be strictly positive");
    pts.push_back({-std::log(static_cast<double>(i) / kp1), std::log(v)});
  }
  return pts;
}

enum class TraceEstimator { hill, moment };
/// Whether a trace stores tail indices alpha or extreme value indices 1/alpha.
enum class TraceScale { alpha, gamma };

struct EstimatorTrace {
  TraceEstimator estimator = TraceEstimator::hill;
  TraceScale scale = TraceScale::alpha;
  std::vector<std::size_t> ks;
  std::vector<double> estimates;
  std::size_t skipped = 0;  // ks where the estimator raised a domain error
};

struct TraceOptions {
  TraceEstimator estimator = TraceEstimator::hill;
  std::size_t k_min = 1;
  std::size_t k_max = 1;
  std::size_t stride = 1;
  TraceScale scale = TraceScale::alpha;
  ValueTransform transform = ValueTransform::raw;
  MomentFormula formula = MomentFormula::standard;
};

/// Hill or moment estimates for k = k_min, k_min + stride, ..., <= k_max.
inline EstimatorTrace estimator_trace(const TimeSeries& x, const TraceOptions& opt) {
  if (opt.k_min < 1 || opt.k_min >= opt.k_max || opt.k_max > x.size() - 1) {
    detail::domain_fail("estimator_trace", "need 1 <= k_min < k_max <= n - 1");
  }
  if (opt.stride < 1) detail::domain_fail("estimator_trace", "stride must be >= 1");
  const OrderStatistics os(x, opt.transform);
  EstimatorTrace tr;
  tr.estimator = opt.estimator;
  tr.scale = opt.scale;
  for (std::size_t k = opt.k_min; k <= opt.k_max; k += opt.stride) {
    try {
      double v = 0.0;
      if (opt.estimator == TraceEstimator::hill) {
        const double a = hill_estimate(os, k);
        v = opt.scale == TraceScale::alpha ? a : 1.0 / a;
      } else {
        const auto m = moment_estimate(os, k, opt.formula);
        if (opt.scale == TraceScale::gamma) {
          v = m.gamma;
        } else if (m.alpha) {
          v = *m.alpha;
        } else {
          ++tr.skipped;
          continue;
        }
      }
      tr.ks.push_back(k);
      tr.estimates.push_back(v);
    } catch (const DomainError&) {
      ++tr.skipped;
    }
  }
  if (tr.ks.empty()) throw EstimationError("estimator_trace: no k produced an estimate");
  return tr;
}

}  // namespace heavytail
