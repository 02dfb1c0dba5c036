#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "heavytail/cli/run_config.hpp"
#include "heavytail/errors.hpp"
#include "heavytail/estimators.hpp"
#include "heavytail/io/csv.hpp"
#include "heavytail/io/svg.hpp"
#include "heavytail/scaling.hpp"
#include "heavytail/simulators.hpp"
#include "heavytail/time_series.hpp"

namespace heavytail::cli {

struct RunResult {
  int status = exit_code::success;
  std::vector<std::filesystem::path> artifacts;
  std::string message;
};

/// Reads or simulates the sample; analysis commands demean unless disabled.
inline TimeSeries load_series(const RunConfig& cfg) {
  TimeSeries x = [&] {
    if (cfg.input_path) return io::ingest_csv(*cfg.input_path, cfg.column);
    RngStream rng(cfg.seed, cfg.stream);
    return simulate(rng, *cfg.simulation);
  }();
  if (cfg.command != Command::simulate && cfg.demean) return demean(x);
  return x;
}

struct KRange {
  std::size_t k_min = 1;
  std::size_t k_max = 2;
};

/// k_min defaults to 10 and k_max to n/5, both clipped to [1, n - 1].
inline KRange resolve_k_range(const RunConfig& cfg, std::size_t n) {
  if (n < 3) throw DomainError("order-statistics tools need n >= 3");
  KRange r;
  r.k_min = cfg.k_min.value_or(std::min<std::size_t>(10, n - 2));
  r.k_max = cfg.k_max.value_or(std::max(r.k_min + 1, std::min(n - 1, n / 5)));
  r.k_max = std::min(r.k_max, n - 1);
  if (r.k_min >= r.k_max) throw UsageError("k range is empty for a sample of size " + std::to_string(n));
  return r;
}

namespace detail {

class ArtifactSink {
 public:
  explicit ArtifactSink(const RunConfig& cfg, RunResult& result) : cfg_(cfg), result_(result) {}

  void write(const std::string& name, const std::string& content) {
    const auto path = cfg_.output_dir / name;
    io::write_file_atomic(path, content);
    result_.artifacts.push_back(path);
  }

  void write_svg(const std::string& name, const io::SvgPlot& plot) {
    if (cfg_.wants_svg()) write(name, plot.render());
  }

  void write_config_echo() {
    std::string s;
    for (const auto& [k, v] : describe(cfg_)) s += k + "=" + v + "\n";
    write("run_config.txt", s);
  }

 private:
  const RunConfig& cfg_;
  RunResult& result_;
};

inline void append_config(io::CsvWriter& csv, const RunConfig& cfg) {
  for (const auto& [k, v] : describe(cfg)) csv.row_strings({"config." + k, v});
}

inline FitOptions fit_options(const RunConfig& cfg) {
  FitOptions o;
  o.mode = cfg.branch;
  return o;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const auto m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace detail

inline RunResult run_simulate(const RunConfig& cfg) {
  RunResult res;
  detail::ArtifactSink sink(cfg, res);
  const auto x = load_series(cfg);
  io::CsvWriter csv({"value"});
  for (double v : x.values()) csv.row(v);
  sink.write("series.csv", csv.str());
  sink.write_config_echo();
  return res;
}

/// Empirical scaling curve with the q/2 baseline and, when an alpha is given or
/// can be estimated, the asymptotic form.
inline RunResult run_scaling(const RunConfig& cfg) {
  RunResult res;
  detail::ArtifactSink sink(cfg, res);
  const auto x = load_series(cfg);
  const auto q = default_q_grid(cfg.q_max, cfg.num_q);
  const auto curve = build_scaling_curve(x, q, cfg.regression_points);

  std::optional<double> alpha = cfg.alpha_overlay;
  if (!alpha) {
    try {
      alpha = scaling_fit_estimate(curve, detail::fit_options(cfg)).alpha_hat;
    } catch (const EstimationError& e) {
      res.message = std::string("no asymptotic overlay: ") + e.what();
    }
  }

  std::vector<double> baseline(q.size());
  std::vector<double> asym(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    baseline[i] = q[i] / 2.0;
    if (alpha) asym[i] = asymptotic_tau(*alpha, q[i]);
  }

  std::vector<std::string> header{"q", "tau_hat", "baseline", "skipped_cells"};
  if (alpha) header.emplace_back("tau_asymptotic");
  io::CsvWriter csv(header);
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (alpha) {
      csv.row(q[i], curve.tau_hat[i], baseline[i], curve.skipped_cells[i], asym[i]);
    } else {
      csv.row(q[i], curve.tau_hat[i], baseline[i], curve.skipped_cells[i]);
    }
  }
  sink.write("scaling_curve.csv", csv.str());

  io::SvgPlot plot("Empirical scaling function (n = " + std::to_string(x.size()) + ")", "q", "tau(q)");
  plot.add("empirical", q, curve.tau_hat, io::LineStyle::dotted);
  if (alpha) plot.add("asymptotic, alpha = " + io::format_real(std::round(*alpha * 1000) / 1000), q, asym,
                      io::LineStyle::solid);
  plot.add("baseline q/2", q, baseline, io::LineStyle::dot_dashed);
  sink.write_svg("scaling_plot.svg", plot);
  sink.write_config_echo();
  if (curve.total_skipped() > 0) {
    res.message += (res.message.empty() ? "" : "; ") + std::string("warning: ") +
                   std::to_string(curve.total_skipped()) + " grid cells with zero partition function were skipped";
  }
  return res;
}

/// Scaling-fit tail index report.
inline RunResult run_estimate(const RunConfig& cfg) {
  RunResult res;
  detail::ArtifactSink sink(cfg, res);
  const auto x = load_series(cfg);
  const auto q = default_q_grid(cfg.q_max, cfg.num_q);

  io::CsvWriter csv({"key", "value"});
  try {
    const auto curve = build_scaling_curve(x, q, cfg.regression_points);
    const auto est = scaling_fit_estimate(curve, detail::fit_options(cfg));
    csv.row_strings({"status", est.inconclusive ? "inconclusive" : "ok"});
    csv.row("alpha_hat", est.alpha_hat);
    csv.row_strings({"branch", std::string(to_string(est.branch))});
    csv.row("sse", est.sse);
    if (est.branch_sse_other) {
      const bool le2 = est.branch == Branch::le2;
      csv.row("sse_le2", le2 ? est.sse : *est.branch_sse_other);
      csv.row("sse_gt2", le2 ? *est.branch_sse_other : est.sse);
      csv.row("alpha_le2", le2 ? est.alpha_hat : *est.alpha_other);
      csv.row("alpha_gt2", le2 ? *est.alpha_other : est.alpha_hat);
    }
    csv.row("inconclusive", est.inconclusive);
    csv.row("at_boundary", est.at_boundary);
    csv.row("skipped_cells", curve.total_skipped());
    if (est.inconclusive) res.message = "inconclusive: both branches fit about equally well";
  } catch (const EstimationError& e) {
    csv.row_strings({"status", "failed"});
    csv.row_strings({"error", e.what()});
    res.status = exit_code::estimation;
    res.message = e.what();
  }
  csv.row("n", x.size());
  detail::append_config(csv, cfg);
  sink.write("estimate.csv", csv.str());
  sink.write_config_echo();
  return res;
}

/// Hill or moment estimates against k.
inline RunResult run_trace(const RunConfig& cfg) {
  RunResult res;
  detail::ArtifactSink sink(cfg, res);
  const auto x = load_series(cfg);
  const auto kr = resolve_k_range(cfg, x.size());
  TraceOptions opt;
  opt.estimator = cfg.estimator;
  opt.k_min = kr.k_min;
  opt.k_max = kr.k_max;
  opt.stride = cfg.stride;
  opt.scale = cfg.trace_scale;
  opt.transform = cfg.transform;
  opt.formula = cfg.moment_formula;
  const auto tr = estimator_trace(x, opt);

  const std::string label = cfg.trace_scale == TraceScale::alpha ? "alpha_hat" : "gamma_hat";
  io::CsvWriter csv({"k", label});
  std::vector<double> ks;
  for (std::size_t i = 0; i < tr.ks.size(); ++i) {
    csv.row(tr.ks[i], tr.estimates[i]);
    ks.push_back(static_cast<double>(tr.ks[i]));
  }
  sink.write("trace.csv", csv.str());
  const std::string name = cfg.estimator == TraceEstimator::hill ? "Hill" : "Moment";
  io::SvgPlot plot(name + " estimator plot", "k", label);
  plot.add(name, ks, tr.estimates, io::LineStyle::solid);
  sink.write_svg("trace.svg", plot);
  sink.write_config_echo();
  if (tr.skipped > 0) res.message = std::to_string(tr.skipped) + " values of k produced no estimate";
  return res;
}

/// QQ plot of log data on exponential quantiles.
inline RunResult run_qq(const RunConfig& cfg) {
  RunResult res;
  detail::ArtifactSink sink(cfg, res);
  const auto x = load_series(cfg);
  // Default: every strictly positive value (after the optional |X|).
  std::size_t positive = 0;
  for (double v : x.values()) positive += (cfg.transform == ValueTransform::absolute ? v != 0.0 : v > 0.0) ? 1 : 0;
  if (positive == 0) throw DomainError("qq: no strictly positive values to plot");
  const std::size_t k = cfg.qq_k.value_or(positive);
  const auto pts = qq_points(x, k, cfg.transform);
  io::CsvWriter csv({"i", "exponential_quantile", "log_value"});
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    csv.row(i + 1, pts[i].exponential_quantile, pts[i].log_value);
    xs.push_back(pts[i].exponential_quantile);
    ys.push_back(pts[i].log_value);
  }
  sink.write("qq.csv", csv.str());
  io::SvgPlot plot("QQ plot (k = " + std::to_string(k) + ")", "-ln(i/(k+1))", "ln X(i)");
  plot.add("data", xs, ys, io::LineStyle::markers);
  sink.write_svg("qq.svg", plot);
  sink.write_config_echo();
  return res;
}

/// Scaling-fit estimate next to Hill and moment summaries (median over the k
/// range) for the same sample.
inline RunResult run_compare(const RunConfig& cfg) {
  RunResult res;
  detail::ArtifactSink sink(cfg, res);
  const auto x = load_series(cfg);
  io::CsvWriter csv({"estimator", "alpha_hat", "k_min", "k_max", "points", "note"});

  try {
    const auto curve = build_scaling_curve(x, default_q_grid(cfg.q_max, cfg.num_q), cfg.regression_points);
    const auto est = scaling_fit_estimate(curve, detail::fit_options(cfg));
    csv.row("scaling_fit", est.alpha_hat, "", "", curve.size(),
            "branch=" + std::string(to_string(est.branch)) + (est.inconclusive ? " inconclusive" : ""));
  } catch (const EstimationError& e) {
    csv.row("scaling_fit", std::nan(""), "", "", 0, std::string("failed: ") + e.what());
    res.status = exit_code::estimation;
    res.message = e.what();
  }

  const auto kr = resolve_k_range(cfg, x.size());
  for (auto which : {TraceEstimator::hill, TraceEstimator::moment}) {
    TraceOptions opt;
    opt.estimator = which;
    opt.k_min = std::max<std::size_t>(kr.k_min, which == TraceEstimator::moment ? 2 : 1);
    opt.k_max = kr.k_max;
    opt.stride = cfg.stride;
    opt.transform = cfg.transform;
    opt.formula = cfg.moment_formula;
    const char* name = which == TraceEstimator::hill ? "hill_median" : "moment_median";
    try {
      const auto tr = estimator_trace(x, opt);
      csv.row(name, detail::median(tr.estimates), opt.k_min, opt.k_max, tr.estimates.size(),
              tr.skipped ? std::to_string(tr.skipped) + " k skipped" : std::string());
    } catch (const std::exception& e) {
      csv.row(name, std::nan(""), opt.k_min, opt.k_max, 0, std::string("failed: ") + e.what());
    }
  }
  detail::append_config(csv, cfg);
  sink.write("compare.csv", csv.str());
  sink.write_config_echo();
  return res;
}

/// Runs one command, mapping failures to the documented exit statuses.
inline RunResult run(const RunConfig& cfg) {
  try {
    validate(cfg);
    switch (cfg.command) {
      case Command::simulate: return run_simulate(cfg);
      case Command::scaling: return run_scaling(cfg);
      case Command::estimate: return run_estimate(cfg);
      case Command::trace: return run_trace(cfg);
      case Command::qq: return run_qq(cfg);
      case Command::compare: return run_compare(cfg);
    }
    throw UsageError("unknown command");
  } catch (const UsageError& e) {
    return {exit_code::usage, {}, e.what()};
  } catch (const EstimationError& e) {
    return {exit_code::estimation, {}, e.what()};
  } catch (const DataError& e) {
    return {exit_code::data, {}, e.what()};
  } catch (const DomainError& e) {
    return {exit_code::data, {}, e.what()};
  }
}

}  // namespace heavytail::cli
