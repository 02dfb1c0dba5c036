#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "heavytail/detail/compensated_sum.hpp"
#include "heavytail/errors.hpp"

namespace heavytail {

/// An ordered sample X_1..X_n of finite reals.
///
/// Construction validates that the sample is non-empty and finite, so every
/// downstream operation can rely on those two facts. The `demeaned` flag
/// records whether the sample mean has been subtracted; `source` is free-form
/// provenance (file name, simulator description, ...).
class TimeSeries {
 public:
  explicit TimeSeries(std::vector<double> values, std::string source = {})
      : TimeSeries(std::move(values), false, std::move(source)) {}

  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] bool demeaned() const noexcept { return demeaned_; }
  [[nodiscard]] const std::string& source() const noexcept { return source_; }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }

  [[nodiscard]] double mean() const noexcept {
    detail::CompensatedSum acc;
    for (double v : values_) acc += v;
    return acc.value() / static_cast<double>(values_.size());
  }

  friend TimeSeries demean(const TimeSeries& x);

 private:
  TimeSeries(std::vector<double> values, bool demeaned, std::string source)
      : values_(std::move(values)), demeaned_(demeaned), source_(std::move(source)) {
    if (values_.empty()) detail::domain_fail("TimeSeries", "sample must contain at least one value");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        detail::domain_fail("TimeSeries", "non-finite value at index " + std::to_string(i));
      }
    }
  }

  std::vector<double> values_;
  bool demeaned_ = false;
  std::string source_;
};

/// Subtracts the sample mean from every observation.
inline TimeSeries demean(const TimeSeries& x) {
  const double m = x.mean();
  std::vector<double> out(x.values().begin(), x.values().end());
  for (double& v : out) v -= m;
  // One correction pass absorbs the rounding left by the first subtraction.
  detail::CompensatedSum residual;
  for (double v : out) residual += v;
  const double r = residual.value() / static_cast<double>(out.size());
  for (double& v : out) v -= r;
  return TimeSeries(std::move(out), true, x.source());
}

}  // namespace heavytail
