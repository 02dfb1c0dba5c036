#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include "heavytail/rng.hpp"
#include "heavytail/simulators.hpp"
#include "support/oracles.hpp"

using namespace heavytail;
using Catch::Approx;

namespace {

std::vector<double> to_vector(const TimeSeries& x) { return {x.values().begin(), x.values().end()}; }

double lag1_autocorrelation(const std::vector<double>& v) {
  double m = 0.0;
  for (double e : v) m += e;
  m /= static_cast<double>(v.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    den += (v[i] - m) * (v[i] - m);
    if (i + 1 < v.size()) num += (v[i] - m) * (v[i + 1] - m);
  }
  return num / den;
}

}  // namespace

TEST_CASE("streams are reproducible and distinct", "[rng]") {
  RngStream a(7, 0), b(7, 0), c(7, 1), d(8, 0);
  std::set<std::uint64_t> firsts;
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next();
    CHECK(va == b.next());
    firsts.insert(va);
  }
  RngStream a2(7, 0);
  CHECK(a2.next() != c.next());
  RngStream a3(7, 0);
  CHECK(a3.next() != d.next());
  CHECK(firsts.size() == 100);
}

TEST_CASE("uniform draws lie strictly inside the unit interval", "[rng]") {
  RngStream r(1);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  CHECK(lo > 0.0);
  CHECK(hi < 1.0);
  CHECK(sum / n == Approx(0.5).margin(0.005));
}

TEST_CASE("normal, exponential and gamma moments", "[rng]") {
  RngStream r(2);
  const int n = 200000;
  double s1 = 0, s2 = 0, e = 0, g = 0, gs = 0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s1 += z;
    s2 += z * z;
    e += r.exponential();
    g += r.gamma(2.5);
    gs += r.gamma(0.4);
  }
  CHECK(s1 / n == Approx(0.0).margin(0.01));
  CHECK(s2 / n == Approx(1.0).margin(0.01));
  CHECK(e / n == Approx(1.0).margin(0.01));
  CHECK(g / n == Approx(2.5).margin(0.03));
  CHECK(gs / n == Approx(0.4).margin(0.01));
}

TEST_CASE("stable alpha = 2 is normal with standard deviation sqrt 2", "[stable]") {
  RngStream r(3);
  std::vector<double> v(100000);
  for (auto& e : v) e = sample_stable(r, 2.0);
  CHECK(oracle::ks_distance(v, [](double x) { return oracle::normal_cdf(x, 0.0, std::numbers::sqrt2); }) < 0.01);
}

TEST_CASE("stable alpha = 1 symmetric is Cauchy", "[stable]") {
  RngStream r(4);
  std::vector<double> v(100000);
  for (auto& e : v) e = sample_stable(r, 1.0);
  CHECK(oracle::ks_distance(v, [](double x) { return 0.5 + std::atan(x) / std::numbers::pi; }) < 0.01);
}

TEST_CASE("stable parameter checks and affine structure", "[stable]") {
  RngStream r(5);
  CHECK_THROWS_AS(sample_stable(r, 0.0), DomainError);
  CHECK_THROWS_AS(sample_stable(r, 2.5), DomainError);
  CHECK_THROWS_AS(sample_stable(r, 1.5, 2.0), DomainError);
  CHECK_THROWS_AS(sample_stable(r, 1.5, 0.0, -1.0), DomainError);
  RngStream a(6), b(6);
  for (int i = 0; i < 100; ++i) CHECK(sample_stable(b, 1.5, 0.0, 3.0, 2.0) == Approx(3.0 * sample_stable(a, 1.5) + 2.0));
}

TEST_CASE("skewed stable draws are finite", "[stable]") {
  RngStream r(7);
  for (double a : {0.5, 1.0, 1.5}) {
    for (int i = 0; i < 1000; ++i) CHECK(std::isfinite(sample_stable(r, a, 0.8)));
  }
}

TEST_CASE("Student draws follow the scaled Student law", "[student]") {
  RngStream r(8);
  std::vector<double> v(50000);
  for (auto& e : v) e = sample_student(r, 3.0, 1.0, 0.0);
  CHECK(oracle::ks_distance(v, [](double x) { return oracle::student_cdf(x, 3.0, 1.0, 0.0); }) < 0.01);
  CHECK(oracle::student_cdf(0.0, 3.0, 1.0, 0.0) == Approx(0.5));
  CHECK(oracle::student_cdf(1e6, 3.0, 1.0, 0.0) == Approx(1.0).margin(1e-6));
  CHECK_THROWS_AS(sample_student(r, 1.0), DomainError);
}

TEST_CASE("F1 and F2 inverse survival round trips", "[pareto]") {
  for (double u : {1e-9, 1e-4, 0.01, 0.1, 0.5, 0.999, 1.0}) {
    CHECK(f1_survival(f1_from_survival(u)) == Approx(u).epsilon(1e-14));
    CHECK(f2_survival(f2_from_survival(u)) == Approx(u).epsilon(1e-9));
  }
  CHECK(f2_from_survival(0.1) == Approx(25.756202209459385).epsilon(1e-9));
  CHECK(f1_from_survival(0.25) == 16.0);
  CHECK_THROWS_AS(f1_from_survival(0.0), DomainError);
  CHECK_THROWS_AS(f2_from_survival(1.5), DomainError);
}

TEST_CASE("i.i.d. dispatch", "[simulate]") {
  RngStream r(9);
  ProcessParams p;
  p.scale = 2.0;
  p.location = 5.0;
  const auto x = simulate_iid(r, Process::iid_normal, p, 50000);
  CHECK(x.mean() == Approx(5.0).margin(0.05));
  const auto f = simulate_iid(r, Process::pareto_f1, p, 100);
  for (double v : f.values()) CHECK(v >= 1.0);
  const auto g = simulate_iid(r, Process::f2, p, 100);
  for (double v : g.values()) CHECK(v >= std::numbers::e);
  CHECK_THROWS_AS(simulate_iid(r, Process::ou_stable, p, 10), DomainError);
  CHECK_THROWS_AS(simulate_iid(r, Process::iid_normal, p, 0), DomainError);
  CHECK(parse_process("student_diffusion") == Process::student_diffusion);
  CHECK_FALSE(parse_process("nope").has_value());
}

TEST_CASE("Gaussian OU: lag-one autocorrelation is exp(-lambda)", "[ou]") {
  RngStream r(10);
  const auto x = simulate_ou_stable(r, {2.0, 1.0}, 20000);
  CHECK(x.size() == 20000);
  CHECK(lag1_autocorrelation(to_vector(x)) == Approx(std::exp(-1.0)).margin(0.03));
  // Stationary variance of dX = -X dt + dL with Var(L_1) = 2 is 1.
  double s2 = 0.0;
  for (double v : x.values()) s2 += v * v;
  CHECK(s2 / static_cast<double>(x.size()) == Approx(1.0).margin(0.06));
}

TEST_CASE("OU argument checks", "[ou]") {
  RngStream r(11);
  CHECK_THROWS_AS(simulate_ou_stable(r, {1.0, 1.0}, 0), DomainError);
  CHECK_THROWS_AS(simulate_ou_stable(r, {1.0, 200.0}, 10), DomainError);
  CHECK_THROWS_AS(simulate_ou_stable(r, {2.5, 1.0}, 10), DomainError);
  CHECK(ou_euler_step(1.0, 1.0, 0.1, 0.0) == Approx(0.9));
}

TEST_CASE("Student diffusion coefficient and derivative", "[diffusion]") {
  const StudentDiffusionParams p;
  CHECK(student_sigma(0.0, p) == Approx(std::sqrt(2.0)));  // 2 * 2 / 2 = 2
  const double h = 1e-6;
  for (double x : {-3.0, -0.5, 0.0, 1.0, 10.0}) {
    const double numeric = (student_sigma(x + h, p) - student_sigma(x - h, p)) / (2 * h);
    CHECK(student_sigma_prime(x, p) == Approx(numeric).margin(1e-6));
  }
  // With z = 1 the Milstein correction vanishes.
  CHECK(student_diffusion_step(0.5, p, 0.01, 1.0, SdeScheme::milstein) ==
        Approx(student_diffusion_step(0.5, p, 0.01, 1.0, SdeScheme::euler_maruyama)));
}

TEST_CASE("Student diffusion marginal under both schemes", "[diffusion]") {
  auto cdf = [](double x) { return oracle::student_cdf(x, 3.0, 1.0, 0.0); };
  for (auto scheme : {SdeScheme::milstein, SdeScheme::euler_maruyama}) {
    RngStream r(12);
    const auto x = simulate_student_diffusion(r, {}, 20000, kDefaultSubsteps, std::nullopt, scheme);
    CHECK(oracle::ks_distance(to_vector(x), cdf) < 0.03);
  }
  RngStream r(13);
  StudentDiffusionParams bad;
  bad.nu = 0.5;
  CHECK_THROWS_AS(simulate_student_diffusion(r, bad, 10), DomainError);
}

TEST_CASE("simulation is deterministic per seed and stream", "[simulate][property]") {
  SimulationSpec spec;
  spec.process = Process::ou_stable;
  spec.n = 200;
  RngStream a(21, 3), b(21, 3), c(21, 4);
  const auto xa = simulate(a, spec);
  const auto xb = simulate(b, spec);
  const auto xc = simulate(c, spec);
  CHECK(to_vector(xa) == to_vector(xb));
  CHECK(to_vector(xa) != to_vector(xc));
}
