#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "heavytail/rng.hpp"
#include "heavytail/scaling.hpp"
#include "heavytail/simulators.hpp"

using namespace heavytail;
using Catch::Approx;

TEST_CASE("rate function branches", "[rate]") {
  CHECK(rate_function({1.0, 0.5, 0.4}) == Approx(0.2));          // q <= alpha <= 2
  CHECK(rate_function({1.0, 3.0, 0.4}) == Approx(2.4));          // alpha < q, alpha <= 2
  CHECK(rate_function({3.0, 2.0, 0.4}) == Approx(0.4));          // q <= alpha, alpha > 2
  CHECK(rate_function({3.0, 12.0, 0.1}) == Approx(3.1));         // LLN term dominates
  CHECK(rate_function({3.0, 4.0, 0.9}) == Approx(1.8));          // CLT term dominates
  CHECK_THROWS_AS(rate_function({0.0, 1.0, 0.5}), DomainError);
  CHECK_THROWS_AS(rate_function({1.0, 1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(rate_function({1.0, -1.0, 0.5}), DomainError);
}

TEST_CASE("rate function is continuous across its case boundaries", "[rate][property]") {
  const double eps = 1e-9;
  for (double s : {0.1, 0.5, 0.9}) {
    for (double a : {0.5, 1.0, 1.7, 3.0, 5.0}) {
      CHECK(rate_function({a, a + eps, s}) == Approx(rate_function({a, a, s})).margin(1e-7));
    }
    for (double q : {0.5, 1.9, 3.0, 8.0}) {
      CHECK(rate_function({2.0 + eps, q, s}) == Approx(rate_function({2.0, q, s})).margin(1e-7));
    }
  }
}

TEST_CASE("asymptotic tau spot values", "[tau]") {
  CHECK(asymptotic_tau(3.0, 4.0) == Approx(1.740741).margin(1e-6));
  CHECK(asymptotic_tau(3.0, 4.0) == Approx(12.0 * 109.0 / 162.0 - 6.0 * 19.0 / 18.0).epsilon(1e-14));
  CHECK(asymptotic_tau(1.0, 0.5) == 0.5);
  CHECK(asymptotic_tau(1.0, 3.0) == 1.0);
  CHECK(asymptotic_tau(4.0, 3.0) == 1.5);
  CHECK_THROWS_AS(asymptotic_tau(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(asymptotic_tau(1.0, 0.0), DomainError);
}

TEST_CASE("closed form equals the regression integral", "[tau][property]") {
  double worst = 0.0;
  for (int ai = 0; ai <= 28; ++ai) {
    const double a = 0.3 + 0.2 * ai;
    for (int qi = 1; qi <= 80; ++qi) {
      const double q = 0.1 * qi;
      worst = std::max(worst, std::fabs(asymptotic_tau(a, q) - tau_by_integration(a, q)));
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("tau is continuous at q = alpha", "[tau][property]") {
  const double eps = 1e-8;
  for (double a : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0}) {
    CHECK(std::fabs(asymptotic_tau(a, a + eps) - asymptotic_tau(a, a - eps)) < 1e-6);
  }
}

TEST_CASE("tau approaches the baseline for large alpha and is bounded by one below two", "[tau][property]") {
  for (double q : {0.5, 2.0, 6.0}) CHECK(asymptotic_tau(1e6, q) == Approx(q / 2.0).margin(1e-4));
  for (double a : {0.3, 1.0, 2.0}) {
    for (double q : {0.1, 1.0, 5.0, 20.0}) CHECK(asymptotic_tau(a, q) <= 1.0);
  }
}

TEST_CASE("rate kink location", "[tau]") {
  CHECK_FALSE(rate_kink(1.5, 3.0).has_value());
  CHECK_FALSE(rate_kink(3.0, 2.5).has_value());
  REQUIRE(rate_kink(3.0, 4.0).has_value());
  CHECK(*rate_kink(3.0, 4.0) == Approx(1.0 / 3.0));
  CHECK_THROWS_AS(tau_by_integration(3.0, 4.0, 10), DomainError);
}

TEST_CASE("least squares line", "[fit]") {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
  const std::vector<double> y{1.0, 3.0, 5.0, 7.0};
  const auto f = fit_line(x, y);
  CHECK(f.slope == Approx(2.0));
  CHECK(f.intercept == Approx(1.0));
  CHECK(f.points == 4);
  const std::vector<double> one{1.0};
  const std::vector<double> flat{2.0, 2.0};
  CHECK_THROWS_AS(fit_line(one, one), EstimationError);
  CHECK_THROWS_AS(fit_line(flat, x), std::exception);
}

TEST_CASE("default q grid", "[fit]") {
  const auto q = default_q_grid(8.0, 4);
  REQUIRE(q.size() == 4);
  CHECK(q.front() == 2.0);
  CHECK(q.back() == 8.0);
  CHECK_THROWS_AS(default_q_grid(0.0, 4), DomainError);
}

TEST_CASE("empirical scaling function of a normal sample stays near the baseline", "[scaling]") {
  RngStream rng(42);
  std::vector<double> v(20000);
  for (auto& e : v) e = rng.normal();
  const auto x = demean(TimeSeries(v));
  const auto q = default_q_grid(4.0, 8);
  const auto c = build_scaling_curve(x, q);
  for (std::size_t i = 0; i < q.size(); ++i) CHECK(std::fabs(c.tau_hat[i] - q[i] / 2.0) < 0.3);
  CHECK(c.total_skipped() == 0);
}

TEST_CASE("empirical scaling function of a stable sample bends towards one", "[scaling]") {
  RngStream rng(43);
  const auto x = simulate_iid(rng, Process::iid_stable, {}, 20000);
  const std::vector<double> q{0.5, 4.0, 8.0};
  const auto c = build_scaling_curve(x, q);
  CHECK(c.tau_hat[0] == Approx(0.5).margin(0.15));
  CHECK(c.tau_hat[2] == Approx(1.0).margin(0.2));
  CHECK(c.tau_hat[2] < 2.0);  // far below the baseline value 4
}

TEST_CASE("scale invariance of the empirical scaling function", "[scaling][property]") {
  RngStream rng(44);
  std::vector<double> v(2000);
  for (auto& e : v) e = rng.normal();
  std::vector<double> w(v);
  for (auto& e : w) e *= 250.0;
  const auto q = default_q_grid(6.0, 6);
  const auto a = build_scaling_curve(TimeSeries(v), q);
  const auto b = build_scaling_curve(TimeSeries(w), q);
  // Multiplying by c shifts every cell by q ln c / ln n, leaving slopes unchanged.
  for (std::size_t i = 0; i < q.size(); ++i) CHECK(b.tau_hat[i] == Approx(a.tau_hat[i]).margin(1e-10));
}

TEST_CASE("exact branch values of tau", "[tau]") {
  for (double a : {2.5, 4.0, 7.0}) {
    for (double q = 0.1; q <= a; q += 0.1) CHECK(asymptotic_tau(a, q) == Approx(q / 2.0).epsilon(1e-15));
  }
  for (double a : {0.3, 1.0, 2.0}) {
    for (double q = a + 0.05; q < 12.0; q += 0.37) CHECK(asymptotic_tau(a, q) == 1.0);
  }
}

TEST_CASE("regression on cells generated from the rate function is exact", "[scaling][property]") {
  const std::vector<double> q{0.3, 0.9, 1.5, 2.5, 6.0};
  for (double a : {0.5, 1.2, 2.0}) {
    std::vector<double> s;
    for (int j = 1; j < 20; ++j) s.push_back(j / 20.0);
    PartitionGrid g(q, s, 1000);
    for (std::size_t i = 0; i < q.size(); ++i) {
      for (std::size_t j = 0; j < s.size(); ++j) g.set(i, j, rate_function({a, q[i], s[j]}) + 0.123);
    }
    for (std::size_t i = 0; i < q.size(); ++i) {
      CHECK(std::fabs(empirical_scaling_function(g, i) - asymptotic_tau(a, q[i])) < 1e-10);
    }
  }
}

TEST_CASE("invalid cells are skipped and counted", "[scaling]") {
  const std::vector<double> q{1.0};
  const std::vector<double> s{0.25, 0.5, 0.75};
  PartitionGrid g(q, s, 100);
  g.set(0, 0, 0.1);
  g.set(0, 1, -std::numeric_limits<double>::infinity());
  g.set(0, 2, 0.6);
  CHECK(empirical_scaling_function(g, 0) == Approx(1.0));
  const auto c = scaling_curve_from_grid(g, 4);
  CHECK(c.total_skipped() == 1);
  g.set(0, 2, std::nan(""));
  CHECK_THROWS_AS(empirical_scaling_function(g, 0), EstimationError);
}
