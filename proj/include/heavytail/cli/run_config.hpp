#pragma once

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "heavytail/estimators.hpp"
#include "heavytail/io/csv.hpp"
#include "heavytail/scaling.hpp"
#include "heavytail/simulators.hpp"

namespace heavytail::cli {

/// Invalid command line or configuration.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { simulate, scaling, estimate, trace, qq, compare };
enum class OutputFormat { csv, svg, both };

namespace exit_code {
inline constexpr int success = 0;
inline constexpr int usage = 2;
inline constexpr int data = 3;
inline constexpr int estimation = 4;
}  // namespace exit_code

inline constexpr const char* kSeedEnvironmentVariable = "HEAVYTAIL_SEED";
inline constexpr std::uint64_t kDefaultSeed = 1;

inline std::string_view to_string(Command c) {
  switch (c) {
    case Command::simulate: return "simulate";
    case Command::scaling: return "scaling";
    case Command::estimate: return "estimate";
    case Command::trace: return "trace";
    case Command::qq: return "qq";
    case Command::compare: return "compare";
  }
  return "unknown";
}

inline std::string_view to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::csv: return "csv";
    case OutputFormat::svg: return "svg";
    default: return "both";
  }
}

/// Fully resolved settings for one CLI invocation.
struct RunConfig {
  Command command = Command::scaling;

  // Data source: exactly one of input_path / simulation.
  std::optional<std::filesystem::path> input_path;
  std::string column;
  std::optional<SimulationSpec> simulation;
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t stream = 0;
  bool demean = true;

  // Scaling function and fit.
  double q_max = kDefaultQMax;
  int num_q = kDefaultQCount;
  int regression_points = kDefaultRegressionPoints;
  BranchMode branch = BranchMode::automatic;
  std::optional<double> alpha_overlay;

  // Order-statistics tools.
  TraceEstimator estimator = TraceEstimator::hill;
  TraceScale trace_scale = TraceScale::alpha;
  std::optional<std::size_t> k_min;
  std::optional<std::size_t> k_max;
  std::size_t stride = 1;
  std::optional<std::size_t> qq_k;
  ValueTransform transform = ValueTransform::raw;
  MomentFormula moment_formula = MomentFormula::standard;

  std::filesystem::path output_dir = ".";
  OutputFormat format = OutputFormat::both;

  [[nodiscard]] bool wants_svg() const noexcept { return format != OutputFormat::csv; }
};

/// Default seed, optionally overridden by HEAVYTAIL_SEED.
inline std::uint64_t default_seed() {
  const char* env = std::getenv(kSeedEnvironmentVariable);
  if (env == nullptr || *env == '\0') return kDefaultSeed;
  std::uint64_t v = 0;
  const std::string_view s(env);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw UsageError(std::string(kSeedEnvironmentVariable) + " is not an unsigned integer: " + std::string(s));
  }
  return v;
}

inline void validate(const RunConfig& c) {
  const bool sim = c.simulation.has_value();
  const bool file = c.input_path.has_value();
  if (sim == file) throw UsageError("exactly one of --input or --process must be given");
  if (c.command == Command::simulate && !sim) throw UsageError("simulate requires --process");
  if (!(c.q_max > 0.0)) throw UsageError("--q-max must be positive");
  if (c.num_q < 1) throw UsageError("--num-q must be >= 1");
  if (c.regression_points < 2) throw UsageError("--regression-points must be >= 2");
  if (c.alpha_overlay && !(*c.alpha_overlay > 0.0)) throw UsageError("--alpha must be positive");
  if (c.stride < 1) throw UsageError("--stride must be >= 1");
  if (c.k_min && c.k_max && *c.k_min >= *c.k_max) throw UsageError("--k-min must be smaller than --k-max");
  if (c.k_min && *c.k_min < 1) throw UsageError("--k-min must be >= 1");
  if (c.qq_k && *c.qq_k < 1) throw UsageError("--k must be >= 1");
  if (sim) {
    const auto& s = *c.simulation;
    if (s.n < 1) throw UsageError("--n must be >= 1");
    if (s.substeps < 1) throw UsageError("--substeps must be >= 1");
  }
}

/// Key/value echo of every resolved setting, for provenance in reports.
inline std::vector<std::pair<std::string, std::string>> describe(const RunConfig& c) {
  using io::format_real;
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("command", std::string(to_string(c.command)));
  if (c.input_path) {
    kv.emplace_back("input", c.input_path->string());
    kv.emplace_back("column", c.column);
  }
  if (c.simulation) {
    const auto& s = *c.simulation;
    kv.emplace_back("process", std::string(to_string(s.process)));
    kv.emplace_back("n", std::to_string(s.n));
    kv.emplace_back("seed", std::to_string(c.seed));
    kv.emplace_back("stream", std::to_string(c.stream));
    kv.emplace_back("stable_alpha", format_real(s.params.alpha));
    kv.emplace_back("stable_beta", format_real(s.params.beta));
    kv.emplace_back("scale", format_real(s.params.scale));
    kv.emplace_back("location", format_real(s.params.location));
    kv.emplace_back("nu", format_real(s.params.nu));
    kv.emplace_back("delta", format_real(s.params.delta));
    kv.emplace_back("mu", format_real(s.params.mu));
    kv.emplace_back("lambda", format_real(s.params.lambda));
    kv.emplace_back("theta", format_real(s.params.theta));
    kv.emplace_back("substeps", std::to_string(s.substeps));
    kv.emplace_back("burn_in", s.burn_in ? std::to_string(*s.burn_in) : "default");
  }
  if (c.command == Command::simulate) return kv;
  kv.emplace_back("demean", c.demean ? "true" : "false");
  kv.emplace_back("q_max", format_real(c.q_max));
  kv.emplace_back("num_q", std::to_string(c.num_q));
  kv.emplace_back("regression_points", std::to_string(c.regression_points));
  kv.emplace_back("branch", std::string(to_string(c.branch)));
  if (c.alpha_overlay) kv.emplace_back("alpha_overlay", format_real(*c.alpha_overlay));
  kv.emplace_back("estimator", c.estimator == TraceEstimator::hill ? "hill" : "moment");
  kv.emplace_back("trace_scale", c.trace_scale == TraceScale::alpha ? "alpha" : "gamma");
  kv.emplace_back("k_min", c.k_min ? std::to_string(*c.k_min) : "default");
  kv.emplace_back("k_max", c.k_max ? std::to_string(*c.k_max) : "default");
  kv.emplace_back("stride", std::to_string(c.stride));
  kv.emplace_back("k", c.qq_k ? std::to_string(*c.qq_k) : "default");
  kv.emplace_back("absolute", c.transform == ValueTransform::absolute ? "true" : "false");
  kv.emplace_back("moment_formula", c.moment_formula == MomentFormula::standard ? "standard" : "as_printed");
  kv.emplace_back("format", std::string(to_string(c.format)));
  return kv;
}

/// Parses a plain-text `key=value` file. Blank lines and lines starting with
/// '#' or ';' are ignored; keys may use '-' or '_' interchangeably.
inline std::vector<std::pair<std::string, std::string>> read_key_value_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open config file " + path.string());
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  std::size_t no = 0;
  while (std::getline(f, line)) {
    ++no;
    const auto t = io::detail::trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ';') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError(path.string() + ":" + std::to_string(no) + ": expected key=value");
    }
    std::string key(io::detail::trim(t.substr(0, eq)));
    for (char& ch : key) {
      if (ch == '_') ch = '-';
    }
    kv.emplace_back(std::move(key), std::string(io::detail::trim(t.substr(eq + 1))));
  }
  return kv;
}

}  // namespace heavytail::cli
