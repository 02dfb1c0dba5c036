#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "heavytail/detail/compensated_sum.hpp"
#include "heavytail/errors.hpp"
#include "heavytail/time_series.hpp"

namespace heavytail {

/// How a sample of length n is cut into consecutive blocks of length floor(t).
struct BlockLayout {
  std::size_t block_length = 0;  // floor(t)
  std::size_t block_count = 0;   // floor(n / floor(t))
  std::size_t used = 0;          // block_count * block_length <= n; the rest is discarded

  friend bool operator==(const BlockLayout&, const BlockLayout&) = default;
};

inline BlockLayout block_layout(std::size_t n, double t) {
  if (n == 0) detail::domain_fail("block_layout", "empty sample");
  if (!(t >= 1.0) || !(t <= static_cast<double>(n))) {
    detail::domain_fail("block_layout", "block length must satisfy 1 <= t <= n");
  }
  BlockLayout b;
  b.block_length = static_cast<std::size_t>(std::floor(t));
  b.block_count = n / b.block_length;
  b.used = b.block_count * b.block_length;
  return b;
}

/// floor(n^s), clamped to [1, n]. Values of n^s within a relative 1e-12 of an
/// integer snap to it so that e.g. 100^0.5 is 10, not 9.
inline std::size_t block_length_for_exponent(std::size_t n, double s) {
  const double v = std::pow(static_cast<double>(n), s);
  const double r = std::round(v);
  const double snapped = std::abs(v - r) <= 1e-12 * std::max(1.0, r) ? r : std::floor(v);
  return std::clamp<std::size_t>(static_cast<std::size_t>(snapped), 1, n);
}

namespace detail {

inline std::vector<double> block_sums(std::span<const double> x, const BlockLayout& b) {
  std::vector<double> sums(b.block_count);
  for (std::size_t i = 0; i < b.block_count; ++i) {
    CompensatedSum acc;
    const std::size_t base = i * b.block_length;
    for (std::size_t j = 0; j < b.block_length; ++j) acc += x[base + j];
    sums[i] = acc.value();
  }
  return sums;
}

// ln( (1/m) * sum |b_i|^q ), evaluated relative to the largest |b_i| so that
// large q never overflows. Returns -inf when every block sum is zero.
inline double log_mean_abs_power(std::span<const double> sums, double q) {
  double max_abs = 0.0;
  for (double b : sums) max_abs = std::max(max_abs, std::abs(b));
  if (max_abs == 0.0) return -std::numeric_limits<double>::infinity();
  CompensatedSum acc;
  for (double b : sums) acc += std::pow(std::abs(b) / max_abs, q);
  return q * std::log(max_abs) + std::log(acc.value()) - std::log(static_cast<double>(sums.size()));
}

inline void check_q(double q, const char* where) {
  if (!(q > 0.0) || !std::isfinite(q)) domain_fail(where, "moment order q must be a finite positive number");
}

}  // namespace detail

/// Block partition function S_q(n, t): the average over floor(n/floor(t))
/// consecutive blocks of |block sum|^q. Trailing observations that do not fill
/// a whole block are discarded.
inline double partition_function(const TimeSeries& x, double q, double t) {
  detail::check_q(q, "partition_function");
  const BlockLayout b = block_layout(x.size(), t);
  const auto sums = detail::block_sums(x.values(), b);
  detail::CompensatedSum acc;
  for (double s : sums) acc += std::pow(std::abs(s), q);
  return acc.value() / static_cast<double>(b.block_count);
}

/// Matrix of ln S_q(n, n^s) / ln n over a (q, s) lattice with s_j = j/N.
///
/// Cells whose partition function is zero are flagged invalid rather than
/// stored as -inf.
class PartitionGrid {
 public:
  PartitionGrid(std::vector<double> q_values, std::vector<double> s_values, std::size_t n)
      : q_(std::move(q_values)),
        s_(std::move(s_values)),
        n_(n),
        cells_(q_.size() * s_.size(), 0.0),
        valid_(q_.size() * s_.size(), 0) {}

  [[nodiscard]] std::span<const double> q_values() const noexcept { return q_; }
  [[nodiscard]] std::span<const double> s_values() const noexcept { return s_; }
  [[nodiscard]] std::size_t n() const noexcept { return n_; }
  [[nodiscard]] std::size_t rows() const noexcept { return q_.size(); }
  [[nodiscard]] std::size_t cols() const noexcept { return s_.size(); }

  [[nodiscard]] double cell(std::size_t qi, std::size_t sj) const { return cells_.at(index(qi, sj)); }
  [[nodiscard]] bool valid(std::size_t qi, std::size_t sj) const { return valid_.at(index(qi, sj)) != 0; }

  [[nodiscard]] std::size_t invalid_count(std::size_t qi) const {
    std::size_t c = 0;
    for (std::size_t j = 0; j < cols(); ++j) c += valid(qi, j) ? 0 : 1;
    return c;
  }

  void set(std::size_t qi, std::size_t sj, double value) {
    const auto k = index(qi, sj);
    if (std::isfinite(value)) {
      cells_[k] = value;
      valid_[k] = 1;
    } else {
      cells_[k] = 0.0;
      valid_[k] = 0;
    }
  }

 private:
  [[nodiscard]] std::size_t index(std::size_t qi, std::size_t sj) const noexcept { return qi * s_.size() + sj; }

  std::vector<double> q_;
  std::vector<double> s_;
  std::size_t n_;
  std::vector<double> cells_;
  std::vector<std::uint8_t> valid_;
};

/// Evaluates ln S_q(n, n^{j/N}) / ln n for every q and j = 1..N-1.
inline PartitionGrid build_partition_grid(const TimeSeries& x, std::span<const double> q_values, int N) {
  const std::size_t n = x.size();
  if (n < 2) detail::domain_fail("build_partition_grid", "need n >= 2 (ln n must be positive)");
  if (N < 2) detail::domain_fail("build_partition_grid", "need N >= 2 regression points");
  if (q_values.empty()) detail::domain_fail("build_partition_grid", "q grid is empty");
  for (std::size_t i = 0; i < q_values.size(); ++i) {
    detail::check_q(q_values[i], "build_partition_grid");
    if (i > 0 && !(q_values[i] > q_values[i - 1])) {
      detail::domain_fail("build_partition_grid", "q grid must be strictly increasing");
    }
  }

  std::vector<double> s(static_cast<std::size_t>(N - 1));
  for (int j = 1; j < N; ++j) s[static_cast<std::size_t>(j - 1)] = static_cast<double>(j) / N;

  PartitionGrid grid(std::vector<double>(q_values.begin(), q_values.end()), s, n);
  const double log_n = std::log(static_cast<double>(n));
  for (std::size_t j = 0; j < s.size(); ++j) {
    const auto len = block_length_for_exponent(n, s[j]);
    const auto sums = detail::block_sums(x.values(), block_layout(n, static_cast<double>(len)));
    for (std::size_t i = 0; i < q_values.size(); ++i) {
      grid.set(i, j, detail::log_mean_abs_power(sums, q_values[i]) / log_n);
    }
  }
  return grid;
}

}  // namespace heavytail
