// Command-line front end for the heavytail library.
//
//   heavytail <command> [--input FILE [--column C] | --process NAME ...] [options]
//
// Commands: simulate, scaling, estimate, trace, qq, compare.
// Options may also come from a key=value file given with --config; flags on
// the command line take precedence over the file.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "heavytail/cli/commands.hpp"

namespace {

using namespace heavytail;
using namespace heavytail::cli;

// Raw option storage. Optional settings are only copied into the RunConfig
// when the corresponding flag was actually given.
struct RawOptions {
  std::string input;
  std::string column;
  std::string process;
  std::size_t n = 1000;
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t stream = 0;
  ProcessParams params;
  int substeps = kDefaultSubsteps;
  std::size_t burn_in = 0;
  bool demean = true;
  double q_max = kDefaultQMax;
  int num_q = kDefaultQCount;
  int regression_points = kDefaultRegressionPoints;
  std::string branch = "auto";
  double alpha_overlay = 0.0;
  TraceEstimator estimator = TraceEstimator::hill;
  TraceScale trace_scale = TraceScale::alpha;
  std::size_t k_min = 0;
  std::size_t k_max = 0;
  std::size_t stride = 1;
  std::size_t qq_k = 0;
  bool absolute = false;
  MomentFormula moment_formula = MomentFormula::standard;
  std::string config;
  std::string out = ".";
  std::string format = "both";
};

struct OptionHandles {
  CLI::Option* input = nullptr;
  CLI::Option* process = nullptr;
  CLI::Option* burn_in = nullptr;
  CLI::Option* alpha_overlay = nullptr;
  CLI::Option* k_min = nullptr;
  CLI::Option* k_max = nullptr;
  CLI::Option* qq_k = nullptr;
};

void add_options(CLI::App* sub, RawOptions& o, OptionHandles& h) {
  h.input = sub->add_option("--input", o.input, "CSV file with the series");
  sub->add_option("--column", o.column, "column name or 0-based index (default: first column)");
  h.process = sub->add_option("--process", o.process,
                              "simulate instead of reading: iid_stable, iid_student, iid_normal, pareto_f1, f2, "
                              "ou_stable, student_diffusion");
  sub->add_option("--n", o.n, "sample size when simulating");
  sub->add_option("--seed", o.seed, "random seed (default from HEAVYTAIL_SEED, else 1)");
  sub->add_option("--stream", o.stream, "random stream identifier");
  sub->add_option("--stable-alpha", o.params.alpha, "stable index (iid_stable, ou_stable)");
  sub->add_option("--stable-beta", o.params.beta, "stable skewness");
  sub->add_option("--scale", o.params.scale, "stable scale or normal standard deviation");
  sub->add_option("--location", o.params.location, "stable location or normal mean");
  sub->add_option("--nu", o.params.nu, "Student tail parameter");
  sub->add_option("--delta", o.params.delta, "Student scale");
  sub->add_option("--mu", o.params.mu, "Student location");
  sub->add_option("--lambda", o.params.lambda, "OU mean-reversion rate");
  sub->add_option("--theta", o.params.theta, "Student diffusion mean-reversion rate");
  sub->add_option("--substeps", o.substeps, "integration steps per unit time");
  h.burn_in = sub->add_option("--burn-in", o.burn_in, "discarded initial unit-time steps");

  sub->add_flag("--demean,!--no-demean", o.demean, "subtract the sample mean before analysis (default on)");
  sub->add_option("--q-max", o.q_max, "largest moment order of the q grid");
  sub->add_option("--num-q", o.num_q, "number of q values");
  sub->add_option("--regression-points", o.regression_points, "N, the number of s points per regression");
  sub->add_option("--branch", o.branch, "model branch: auto, le2, gt2")
      ->check(CLI::IsMember({"auto", "le2", "gt2"}, CLI::ignore_case));
  h.alpha_overlay = sub->add_option("--alpha-overlay,--alpha", o.alpha_overlay,
                                    "alpha for the asymptotic overlay (default: estimated)");
  sub->add_option("--estimator", o.estimator, "trace estimator: hill or moment")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, TraceEstimator>{{"hill", TraceEstimator::hill}, {"moment", TraceEstimator::moment}},
          CLI::ignore_case));
  sub->add_option("--trace-scale", o.trace_scale, "report alpha or gamma")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, TraceScale>{{"alpha", TraceScale::alpha}, {"gamma", TraceScale::gamma}},
          CLI::ignore_case));
  h.k_min = sub->add_option("--k-min", o.k_min, "smallest k (default 10)");
  h.k_max = sub->add_option("--k-max", o.k_max, "largest k (default n/5)");
  sub->add_option("--stride", o.stride, "k step");
  h.qq_k = sub->add_option("--k", o.qq_k, "number of order statistics in the QQ plot (default: all positive values)");
  sub->add_flag("--absolute", o.absolute, "use |X| for order statistics");
  sub->add_option("--moment-formula", o.moment_formula, "standard or as_printed")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, MomentFormula>{{"standard", MomentFormula::standard},
                                               {"as_printed", MomentFormula::as_printed}},
          CLI::ignore_case));
  sub->add_option("--config", o.config, "key=value file; command-line flags take precedence");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--format", o.format, "csv, svg or both")
      ->check(CLI::IsMember({"csv", "svg", "both"}, CLI::ignore_case));
}

RunConfig to_config(Command cmd, const RawOptions& o, const OptionHandles& h) {
  RunConfig c;
  c.command = cmd;
  if (h.input->count() > 0) {
    c.input_path = o.input;
    c.column = o.column;
  }
  if (h.process->count() > 0) {
    const auto p = parse_process(o.process);
    if (!p) throw UsageError("unknown process '" + o.process + "'");
    SimulationSpec s;
    s.process = *p;
    s.params = o.params;
    s.n = o.n;
    s.substeps = o.substeps;
    if (h.burn_in->count() > 0) s.burn_in = o.burn_in;
    c.simulation = s;
  }
  c.seed = o.seed;
  c.stream = o.stream;
  c.demean = o.demean;
  c.q_max = o.q_max;
  c.num_q = o.num_q;
  c.regression_points = o.regression_points;
  c.branch = o.branch == "le2" ? BranchMode::le2 : o.branch == "gt2" ? BranchMode::gt2 : BranchMode::automatic;
  if (h.alpha_overlay->count() > 0) c.alpha_overlay = o.alpha_overlay;
  c.estimator = o.estimator;
  c.trace_scale = o.trace_scale;
  if (h.k_min->count() > 0) c.k_min = o.k_min;
  if (h.k_max->count() > 0) c.k_max = o.k_max;
  c.stride = o.stride;
  if (h.qq_k->count() > 0) c.qq_k = o.qq_k;
  c.transform = o.absolute ? ValueTransform::absolute : ValueTransform::raw;
  c.moment_formula = o.moment_formula;
  c.output_dir = o.out;
  c.format = o.format == "csv" ? OutputFormat::csv : o.format == "svg" ? OutputFormat::svg : OutputFormat::both;
  return c;
}

// Splices `--key=value` pairs from a --config file in front of the explicit
// flags. Combined with the take-last policy this makes command-line values win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty() || args.empty()) return args;
  std::vector<std::string> injected;
  for (const auto& [key, value] : read_key_value_file(path)) {
    // Keys that a run_config.txt echo contains but which are not flags.
    if (key == "command" || key == "config" || value == "default") continue;
    injected.push_back("--" + key + "=" + value);
  }
  // args[0] is the subcommand name; the config entries follow it.
  args.insert(args.begin() + 1, injected.begin(), injected.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tail index estimation by the empirical scaling function and order statistics", "heavytail"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  RawOptions raw;
  try {
    raw.seed = default_seed();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::usage;
  }

  struct Entry {
    Command command;
    const char* name;
    const char* help;
  };
  const Entry entries[] = {
      {Command::simulate, "simulate", "draw a sample and write series.csv"},
      {Command::scaling, "scaling", "empirical scaling function with baseline and asymptotic overlay"},
      {Command::estimate, "estimate", "tail index by least-squares fit of the scaling function"},
      {Command::trace, "trace", "Hill or moment estimator as a function of k"},
      {Command::qq, "qq", "exponential QQ plot of log order statistics"},
      {Command::compare, "compare", "scaling fit, Hill and moment estimates side by side"},
  };
  std::vector<std::pair<CLI::App*, Command>> subs;
  OptionHandles handles[std::size(entries)];
  for (std::size_t i = 0; i < std::size(entries); ++i) {
    auto* sub = app.add_subcommand(entries[i].name, entries[i].help);
    add_options(sub, raw, handles[i]);
    subs.emplace_back(sub, entries[i].command);
  }

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_code::success : exit_code::usage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::usage;
  }

  RunConfig cfg;
  try {
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (subs[i].first->parsed()) cfg = to_config(subs[i].second, raw, handles[i]);
    }
    std::filesystem::create_directories(cfg.output_dir);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::usage;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::data;
  }

  const auto result = run(cfg);
  for (const auto& p : result.artifacts) std::cout << "wrote " << p.string() << "\n";
  if (!result.message.empty()) {
    (result.status == exit_code::success ? std::cout : std::cerr)
        << (result.status == exit_code::success ? "note: " : "error: ") << result.message << "\n";
  }
  return result.status;
}
