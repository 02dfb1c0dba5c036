#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "heavytail/errors.hpp"
#include "heavytail/rng.hpp"
#include "heavytail/time_series.hpp"

namespace heavytail {

// ---------------------------------------------------------------------------
// Single draws
// ---------------------------------------------------------------------------

/// One draw from the stable law S_alpha(scale, beta, location) by the
/// Chambers-Mallows-Stuck transform (alpha = 1 uses its own formula).
/// For alpha = 2 this is normal with variance 2 scale^2.
inline double sample_stable(RngStream& rng, double alpha, double beta = 0.0, double scale = 1.0,
                            double location = 0.0) {
  if (!(alpha > 0.0 && alpha <= 2.0)) detail::domain_fail("sample_stable", "alpha must lie in (0, 2]");
  if (!(beta >= -1.0 && beta <= 1.0)) detail::domain_fail("sample_stable", "beta must lie in [-1, 1]");
  if (!(scale > 0.0) || !std::isfinite(scale)) detail::domain_fail("sample_stable", "scale must be positive");
  if (!std::isfinite(location)) detail::domain_fail("sample_stable", "location must be finite");

  constexpr double half_pi = std::numbers::pi / 2.0;
  const double v = rng.uniform(-half_pi, half_pi);
  const double w = rng.exponential();

  if (alpha == 1.0) {
    const double a = half_pi + beta * v;
    const double x = (a * std::tan(v) - beta * std::log(half_pi * w * std::cos(v) / a)) / half_pi;
    return scale * x + beta * scale * std::log(scale) / half_pi + location;
  }
  const double t = beta * std::tan(half_pi * alpha);
  const double b = std::atan(t) / alpha;
  const double s = std::pow(1.0 + t * t, 1.0 / (2.0 * alpha));
  const double x = s * std::sin(alpha * (v + b)) / std::pow(std::cos(v), 1.0 / alpha) *
                   std::pow(std::cos(v - alpha * (v + b)) / w, (1.0 - alpha) / alpha);
  return scale * x + location;
}

/// One draw from the scaled Student law T(nu, delta, mu) with density
///   Gamma((nu+1)/2) / (delta sqrt(pi) Gamma(nu/2)) (1 + ((x-mu)/delta)^2)^(-(nu+1)/2).
/// Equivalently mu + delta * Z / sqrt(chi2_nu), i.e. delta / sqrt(nu) times a
/// standard t_nu variable. Tail index nu, variance delta^2 / (nu - 2).
inline double sample_student(RngStream& rng, double nu, double delta = 1.0, double mu = 0.0) {
  if (!(nu > 1.0) || !std::isfinite(nu)) detail::domain_fail("sample_student", "nu must exceed 1");
  if (!(delta > 0.0) || !std::isfinite(delta)) detail::domain_fail("sample_student", "delta must be positive");
  if (!std::isfinite(mu)) detail::domain_fail("sample_student", "mu must be finite");
  const double z = rng.normal();
  const double chi2 = rng.chi_square(nu);
  return mu + delta * z / std::sqrt(chi2);
}

/// Survival function 1 - F1(x) = x^(-1/2) on x >= 1 (Pareto, tail index 1/2).
inline double f1_survival(double x) { return x < 1.0 ? 1.0 : 1.0 / std::sqrt(x); }

/// Survival function 1 - F2(x) = e^(1/2) / (x^(1/2) ln x) on x >= e.
inline double f2_survival(double x) {
  if (x <= std::numbers::e) return 1.0;
  return std::exp(0.5) / (std::sqrt(x) * std::log(x));
}

/// Inverse of f1_survival on (0, 1].
inline double f1_from_survival(double u) {
  if (!(u > 0.0 && u <= 1.0)) detail::domain_fail("f1_from_survival", "u must lie in (0, 1]");
  return 1.0 / (u * u);
}

/// Inverse of f2_survival on (0, 1] by bracketing bisection to a relative
/// tolerance of 1e-10.
inline double f2_from_survival(double u) {
  if (!(u > 0.0 && u <= 1.0)) detail::domain_fail("f2_from_survival", "u must lie in (0, 1]");
  double lo = std::numbers::e;
  if (u == 1.0) return lo;
  double hi = 2.0 * lo;
  while (f2_survival(hi) >= u) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-10 * lo) {
    const double mid = 0.5 * (lo + hi);
    if (f2_survival(mid) >= u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double sample_f1(RngStream& rng) { return f1_from_survival(rng.uniform()); }
inline double sample_f2(RngStream& rng) { return f2_from_survival(rng.uniform()); }

inline double sample_normal(RngStream& rng, double mean = 0.0, double sd = 1.0) {
  if (!(sd > 0.0)) detail::domain_fail("sample_normal", "sd must be positive");
  return mean + sd * rng.normal();
}

// ---------------------------------------------------------------------------
// Dependent processes
// ---------------------------------------------------------------------------

inline constexpr int kDefaultSubsteps = 100;

/// Default burn-in: ten mean-reversion times, in retained observations.
inline std::size_t default_burn_in(double rate) {
  return 10 * static_cast<std::size_t>(std::ceil(1.0 / rate));
}

struct OuStableParams {
  double alpha = 1.0;
  double lambda = 1.0;
};

/// One Euler step of dX = -lambda X dt + dL_{lambda t} given the driving increment.
inline double ou_euler_step(double x, double lambda, double dt, double increment) noexcept {
  return x - lambda * x * dt + increment;
}

/// Stable Ornstein-Uhlenbeck path by the Euler scheme with `substeps` steps
/// per unit time, one observation kept per unit time, after `burn_in` kept
/// observations are dropped. Increments of L_{lambda t} over dt are symmetric
/// alpha-stable with scale (lambda dt)^(1/alpha).
inline TimeSeries simulate_ou_stable(RngStream& rng, const OuStableParams& p, std::size_t n,
                                     int substeps = kDefaultSubsteps, std::optional<std::size_t> burn_in = {}) {
  if (n < 1) detail::domain_fail("simulate_ou_stable", "n must be >= 1");
  if (!(p.alpha > 0.0 && p.alpha <= 2.0)) detail::domain_fail("simulate_ou_stable", "alpha must lie in (0, 2]");
  if (!(p.lambda > 0.0)) detail::domain_fail("simulate_ou_stable", "lambda must be positive");
  if (substeps < 1) detail::domain_fail("simulate_ou_stable", "substeps must be >= 1");
  const double dt = 1.0 / substeps;
  if (p.lambda * dt >= 1.0) {
    detail::domain_fail("simulate_ou_stable", "unstable Euler scheme: lambda * dt must be < 1");
  }
  const std::size_t burn = burn_in.value_or(default_burn_in(p.lambda));
  const double noise_scale = std::pow(p.lambda * dt, 1.0 / p.alpha);

  std::vector<double> out;
  out.reserve(n);
  double x = sample_stable(rng, p.alpha);
  for (std::size_t t = 0; t < burn + n; ++t) {
    for (int k = 0; k < substeps; ++k) x = ou_euler_step(x, p.lambda, dt, noise_scale * sample_stable(rng, p.alpha));
    if (t >= burn) out.push_back(x);
  }
  return TimeSeries(std::move(out), "ou_stable(alpha=" + std::to_string(p.alpha) +
                                        ", lambda=" + std::to_string(p.lambda) + ")");
}

struct StudentDiffusionParams {
  double nu = 3.0;
  double delta = 1.0;
  double mu = 0.0;
  double theta = 2.0;

  void validate(const char* where) const {
    if (!(nu > 1.0)) detail::domain_fail(where, "nu must exceed 1");
    if (!(delta > 0.0)) detail::domain_fail(where, "delta must be positive");
    if (!std::isfinite(mu)) detail::domain_fail(where, "mu must be finite");
    if (!(theta > 0.0)) detail::domain_fail(where, "theta must be positive");
  }
};

/// Diffusion coefficient sqrt(2 theta delta^2 / (nu - 1) * (1 + ((x - mu)/delta)^2)).
inline double student_sigma(double x, const StudentDiffusionParams& p) noexcept {
  const double u = (x - p.mu) / p.delta;
  return std::sqrt(2.0 * p.theta * p.delta * p.delta / (p.nu - 1.0) * (1.0 + u * u));
}

/// d sigma / dx = (2 theta / (nu - 1)) (x - mu) / sigma(x).
inline double student_sigma_prime(double x, const StudentDiffusionParams& p) noexcept {
  return 2.0 * p.theta / (p.nu - 1.0) * (x - p.mu) / student_sigma(x, p);
}

enum class SdeScheme { milstein, euler_maruyama };

/// One step of the Student diffusion given a standard normal draw z.
inline double student_diffusion_step(double x, const StudentDiffusionParams& p, double dt, double z,
                                     SdeScheme scheme = SdeScheme::milstein) noexcept {
  const double sig = student_sigma(x, p);
  double next = x - p.theta * (x - p.mu) * dt + sig * std::sqrt(dt) * z;
  if (scheme == SdeScheme::milstein) next += 0.5 * sig * student_sigma_prime(x, p) * dt * (z * z - 1.0);
  return next;
}

/// Student diffusion path started from its stationary law T(nu, delta, mu).
inline TimeSeries simulate_student_diffusion(RngStream& rng, const StudentDiffusionParams& p, std::size_t n,
                                             int substeps = kDefaultSubsteps,
                                             std::optional<std::size_t> burn_in = {},
                                             SdeScheme scheme = SdeScheme::milstein) {
  p.validate("simulate_student_diffusion");
  if (n < 1) detail::domain_fail("simulate_student_diffusion", "n must be >= 1");
  if (substeps < 1) detail::domain_fail("simulate_student_diffusion", "substeps must be >= 1");
  const double dt = 1.0 / substeps;
  if (p.theta * dt >= 1.0) {
    detail::domain_fail("simulate_student_diffusion", "unstable scheme: theta * dt must be < 1");
  }
  const std::size_t burn = burn_in.value_or(default_burn_in(p.theta));

  std::vector<double> out;
  out.reserve(n);
  double x = sample_student(rng, p.nu, p.delta, p.mu);
  for (std::size_t t = 0; t < burn + n; ++t) {
    for (int k = 0; k < substeps; ++k) x = student_diffusion_step(x, p, dt, rng.normal(), scheme);
    if (t >= burn) out.push_back(x);
  }
  return TimeSeries(std::move(out), "student_diffusion(nu=" + std::to_string(p.nu) +
                                        ", theta=" + std::to_string(p.theta) + ")");
}

// ---------------------------------------------------------------------------
// i.i.d. samples and the simulation dispatcher
// ---------------------------------------------------------------------------

enum class Process { iid_stable, iid_student, iid_normal, pareto_f1, f2, ou_stable, student_diffusion };

inline std::string_view to_string(Process p) {
  switch (p) {
    case Process::iid_stable: return "iid_stable";
    case Process::iid_student: return "iid_student";
    case Process::iid_normal: return "iid_normal";
    case Process::pareto_f1: return "pareto_f1";
    case Process::f2: return "f2";
    case Process::ou_stable: return "ou_stable";
    case Process::student_diffusion: return "student_diffusion";
  }
  return "unknown";
}

inline std::optional<Process> parse_process(std::string_view s) {
  for (auto p : {Process::iid_stable, Process::iid_student, Process::iid_normal, Process::pareto_f1, Process::f2,
                 Process::ou_stable, Process::student_diffusion}) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

/// Union of per-process parameters; each process reads the fields it needs.
struct ProcessParams {
  double alpha = 1.0;     // stable index
  double beta = 0.0;      // stable skewness
  double scale = 1.0;     // stable scale, normal standard deviation
  double location = 0.0;  // stable location, normal mean
  double nu = 3.0;        // Student tail parameter
  double delta = 1.0;     // Student scale
  double mu = 0.0;        // Student location
  double lambda = 1.0;    // OU mean-reversion rate
  double theta = 2.0;     // Student diffusion mean-reversion rate
};

struct SimulationSpec {
  Process process = Process::iid_normal;
  ProcessParams params;
  std::size_t n = 1000;
  int substeps = kDefaultSubsteps;
  std::optional<std::size_t> burn_in;
};

/// n independent draws from one of the i.i.d. laws.
inline TimeSeries simulate_iid(RngStream& rng, Process law, const ProcessParams& p, std::size_t n) {
  if (n < 1) detail::domain_fail("simulate_iid", "n must be >= 1");
  std::vector<double> out(n);
  switch (law) {
    case Process::iid_stable:
      for (auto& v : out) v = sample_stable(rng, p.alpha, p.beta, p.scale, p.location);
      break;
    case Process::iid_student:
      for (auto& v : out) v = sample_student(rng, p.nu, p.delta, p.mu);
      break;
    case Process::iid_normal:
      for (auto& v : out) v = sample_normal(rng, p.location, p.scale);
      break;
    case Process::pareto_f1:
      for (auto& v : out) v = sample_f1(rng);
      break;
    case Process::f2:
      for (auto& v : out) v = sample_f2(rng);
      break;
    default:
      detail::domain_fail("simulate_iid", "not an i.i.d. law: " + std::string(to_string(law)));
  }
  return TimeSeries(std::move(out), std::string(to_string(law)));
}

inline TimeSeries simulate(RngStream& rng, const SimulationSpec& spec) {
  switch (spec.process) {
    case Process::ou_stable:
      return simulate_ou_stable(rng, {spec.params.alpha, spec.params.lambda}, spec.n, spec.substeps, spec.burn_in);
    case Process::student_diffusion:
      return simulate_student_diffusion(
          rng, {spec.params.nu, spec.params.delta, spec.params.mu, spec.params.theta}, spec.n, spec.substeps,
          spec.burn_in);
    default:
      return simulate_iid(rng, spec.process, spec.params, spec.n);
  }
}

}  // namespace heavytail
