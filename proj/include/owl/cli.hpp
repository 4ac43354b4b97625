#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "owl/dataset.hpp"
#include "owl/serialize.hpp"
#include "owl/solvers.hpp"
#include "owl/sorted_l1.hpp"

namespace owl::cli {

/// Exit codes: 0 success, 2 usage/input error, 3 safety-assertion failure.
struct SafetyViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunSpec {
  // dataset source (exactly one)
  std::string libsvm_path;
  std::string csv_path;
  std::string csv_target;
  bool synthetic = false;
  SyntheticSpec synth;
  bool standardize_data = false;
  bool center_y = false;

  // weight schedule (exactly one)
  double oscar_p = 0.0;
  double oscar_tau = 0.0;
  bool has_oscar_p = false;
  bool has_oscar_tau = false;
  double lasso_lambda = 0.0;
  bool has_lasso = false;
  std::string weights_file;

  // solver settings
  std::string solver = "apgd";
  std::string screening = "on";
  double epsilon = 1e-6;
  Index max_outer = 0;
  Index spgd_T = 0;
  Index spgd_l = 0;
  double eta = 0.0;
  std::uint64_t seed = 0;

  // outputs
  std::string out_json = "result.json";
  std::string out_trace = "trace.csv";
  std::string out_bench = "bench.csv";
  std::string out_data = "data.libsvm";
  int trials = 5;
  bool inject_bench_disagreement = false;  // test hook for the bench safety assertion
};

namespace detail {

inline void add_dataset_options(CLI::App* cmd, RunSpec& spec) {
  cmd->add_option("--libsvm", spec.libsvm_path, "Load a libsvm-format text file");
  cmd->add_option("--csv", spec.csv_path, "Load a CSV file with a header row");
  cmd->add_option("--target", spec.csv_target, "CSV target column (default: last column)");
  cmd->add_flag("--synthetic", spec.synthetic, "Generate a synthetic problem");
  cmd->add_option("--n", spec.synth.n, "Synthetic: sample count");
  cmd->add_option("--d", spec.synth.d, "Synthetic: feature count");
  cmd->add_option("--k-true", spec.synth.k_true, "Synthetic: number of true nonzero groups");
  cmd->add_option("--group-size", spec.synth.group_size, "Synthetic: correlated group size");
  cmd->add_option("--noise-sd", spec.synth.noise_sd, "Synthetic: noise standard deviation");
  cmd->add_option("--data-seed", spec.synth.seed, "Synthetic: RNG seed");
  cmd->add_flag("--standardize", spec.standardize_data,
                "Center columns and scale them to unit norm before solving");
  cmd->add_flag("--center-y", spec.center_y, "Center the response (with --standardize)");
}

inline void add_weight_options(CLI::App* cmd, RunSpec& spec) {
  auto* p = cmd->add_option("--oscar-p", spec.oscar_p,
                            "OSCAR weights from data with sparsity factor p");
  auto* tau = cmd->add_option("--oscar-tau", spec.oscar_tau,
                              "OSCAR weights from data with p = exp(-tau)");
  auto* lasso = cmd->add_option("--lasso", spec.lasso_lambda, "Constant (Lasso) weight");
  cmd->add_option("--weights", spec.weights_file,
                  "Custom weight file, one non-increasing value per line");
  p->each([&spec](const std::string&) { spec.has_oscar_p = true; });
  tau->each([&spec](const std::string&) { spec.has_oscar_tau = true; });
  lasso->each([&spec](const std::string&) { spec.has_lasso = true; });
}

inline void add_solver_options(CLI::App* cmd, RunSpec& spec) {
  cmd->add_option("--solver", spec.solver, "apgd or spgd")
      ->check(CLI::IsMember({"apgd", "spgd"}));
  cmd->add_option("--screening", spec.screening, "on or off")
      ->check(CLI::IsMember({"on", "off"}));
  cmd->add_option("--epsilon", spec.epsilon, "Duality-gap stopping tolerance");
  cmd->add_option("--max-outer", spec.max_outer, "Outer iteration cap (0: solver default)");
  cmd->add_option("--spgd-T", spec.spgd_T, "SPGD inner loop length (0: auto)");
  cmd->add_option("--spgd-l", spec.spgd_l, "SPGD mini-batch size (0: auto)");
  cmd->add_option("--eta", spec.eta, "SPGD step size (0: auto)");
  cmd->add_option("--seed", spec.seed, "Solver RNG seed (spgd sampling)");
}

inline DesignMatrix load_dataset(const RunSpec& spec) {
  int sources = 0;
  if (!spec.libsvm_path.empty()) ++sources;
  if (!spec.csv_path.empty()) ++sources;
  if (spec.synthetic) ++sources;
  if (sources != 1)
    throw std::invalid_argument("exactly one of --libsvm, --csv, --synthetic is required");

  DesignMatrix data;
  if (!spec.libsvm_path.empty())
    data = load_libsvm(spec.libsvm_path);
  else if (!spec.csv_path.empty())
    data = load_csv(spec.csv_path, spec.csv_target);
  else
    data = generate_synthetic(spec.synth).first;
  if (spec.standardize_data) data = standardize(data, spec.center_y);
  return data;
}

inline WeightVector build_weights(const RunSpec& spec, const DesignMatrix& data) {
  int choices = 0;
  if (spec.has_oscar_p) ++choices;
  if (spec.has_oscar_tau) ++choices;
  if (spec.has_lasso) ++choices;
  if (!spec.weights_file.empty()) ++choices;
  if (choices != 1)
    throw std::invalid_argument(
        "exactly one of --oscar-p, --oscar-tau, --lasso, --weights is required");

  if (spec.has_oscar_p) return oscar_weights_from_data(data, spec.oscar_p);
  if (spec.has_oscar_tau) return oscar_weights_from_data(data, std::exp(-spec.oscar_tau));
  if (spec.has_lasso) return lasso_weights(data.d(), spec.lasso_lambda);
  WeightVector w = load_weight_file(spec.weights_file);
  if (w.size() != data.d())
    throw std::invalid_argument("weight file has " + std::to_string(w.size()) +
                                " entries, dataset has " + std::to_string(data.d()) +
                                " features");
  return w;
}

inline SolverConfig make_config(const RunSpec& spec) {
  SolverConfig cfg;
  cfg.mode = spec.solver == "apgd" ? SolverMode::apgd : SolverMode::spgd;
  if (!(spec.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  cfg.epsilon = spec.epsilon;
  cfg.max_outer = spec.max_outer;
  cfg.screening = spec.screening == "on";
  cfg.spgd_T = spec.spgd_T;
  cfg.spgd_l = spec.spgd_l;
  cfg.eta = spec.eta;
  cfg.seed = spec.seed;
  return cfg;
}

inline std::string format_libsvm(const DesignMatrix& m) {
  std::string out;
  char buf[64];
  for (Index i = 0; i < m.n(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", m.y[i]);
    out += buf;
    for (Index j = 0; j < m.d(); ++j) {
      std::snprintf(buf, sizeof(buf), " %lld:%.17g", static_cast<long long>(j + 1), m.X(i, j));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

inline double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

inline double stddev_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mu = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

inline double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t mid = xs.size() / 2;
  return xs.size() % 2 == 1 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

}  // namespace detail

inline int cmd_solve(const RunSpec& spec) {
  DesignMatrix data = detail::load_dataset(spec);
  WeightVector w = detail::build_weights(spec, data);
  SolveResult res = solve(data, w, detail::make_config(spec));
  write_text_file(spec.out_json, result_to_json(res).dump(2) + "\n");
  write_text_file(spec.out_trace, res.trace.to_csv());
  const Index nonzeros = static_cast<Index>((res.beta.array() != 0.0).count());
  std::printf("gap=%.6g nonzeros=%lld iterations=%lld wall_ms=%.3f converged=%s\n",
              res.certificate.gap, static_cast<long long>(nonzeros),
              static_cast<long long>(res.iterations), res.wall_ms,
              res.converged ? "yes" : "no");
  return 0;
}

inline int cmd_bench(const RunSpec& spec) {
  if (spec.trials < 1) throw std::invalid_argument("--trials must be at least 1");
  DesignMatrix data = detail::load_dataset(spec);
  WeightVector w = detail::build_weights(spec, data);

  struct Variant {
    const char* name;
    SolverMode mode;
    bool screening;
  };
  const Variant variants[] = {{"apgd", SolverMode::apgd, false},
                              {"apgd+screen", SolverMode::apgd, true},
                              {"spgd", SolverMode::spgd, false},
                              {"spgd+screen", SolverMode::spgd, true}};

  std::vector<std::vector<double>> times(4);
  std::vector<Vector> betas(4);
  for (int v = 0; v < 4; ++v) {
    SolverConfig cfg = detail::make_config(spec);
    cfg.mode = variants[v].mode;
    cfg.screening = variants[v].screening;
    for (int trial = 0; trial < spec.trials; ++trial) {
      SolveResult res = solve(data, w, cfg);
      times[v].push_back(res.wall_ms);
      betas[v] = res.beta;
    }
  }
  if (spec.inject_bench_disagreement) betas[1].array() += 1.0;

  for (int v = 1; v < 4; ++v) {
    const double diff = (betas[v] - betas[0]).lpNorm<Eigen::Infinity>();
    if (!(diff <= 1e-6))
      throw SafetyViolation(std::string("safety violation: ") + variants[v].name +
                            " disagrees with apgd by " + std::to_string(diff));
  }

  const double apgd_mean = detail::mean_of(times[0]);
  std::string csv = "variant,trials,mean_ms,stddev_ms,median_ms,pct_of_apgd\n";
  char buf[256];
  for (int v = 0; v < 4; ++v) {
    const double mean = detail::mean_of(times[v]);
    std::snprintf(buf, sizeof(buf), "%s,%d,%.17g,%.17g,%.17g,%.17g\n", variants[v].name,
                  spec.trials, mean, detail::stddev_of(times[v]), detail::median_of(times[v]),
                  100.0 * mean / apgd_mean);
    csv += buf;
    std::printf("%-12s mean=%.2f ms  median=%.2f ms  (%.1f%% of apgd)\n", variants[v].name, mean,
                detail::median_of(times[v]), 100.0 * mean / apgd_mean);
  }
  write_text_file(spec.out_bench, csv);
  return 0;
}

inline int cmd_trace(const RunSpec& spec) {
  if (spec.screening != "on")
    throw std::invalid_argument("trace requires screening (drop --screening off)");
  DesignMatrix data = detail::load_dataset(spec);
  WeightVector w = detail::build_weights(spec, data);
  SolveResult res = solve(data, w, detail::make_config(spec));
  write_text_file(spec.out_trace, res.trace.to_csv());
  std::printf("gap=%.6g active=%lld iterations=%lld rows=%zu\n", res.certificate.gap,
              static_cast<long long>(res.active_history.back()),
              static_cast<long long>(res.iterations), res.trace.rows.size());
  return 0;
}

inline int cmd_gen(const RunSpec& spec) {
  if (!spec.synthetic)
    throw std::invalid_argument("gen requires --synthetic (with --n, --d, ...)");
  auto [data, true_beta] = generate_synthetic(spec.synth);
  write_text_file(spec.out_data, detail::format_libsvm(data));
  std::string beta_text;
  char buf[40];
  for (Index i = 0; i < true_beta.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g\n", true_beta[i]);
    beta_text += buf;
  }
  write_text_file(spec.out_data + ".true_beta", beta_text);
  std::printf("wrote %s (%lld x %lld) and %s\n", spec.out_data.c_str(),
              static_cast<long long>(data.n()), static_cast<long long>(data.d()),
              (spec.out_data + ".true_beta").c_str());
  return 0;
}

inline int run(int argc, const char* const* argv) {
  RunSpec spec;
  CLI::App app{"Sorted-L1 (OWL/OSCAR/SLOPE) least-squares solvers with safe feature screening"};
  app.require_subcommand(1);

  auto* solve_cmd =
      app.add_subcommand("solve", "Solve one problem; writes result JSON and trace CSV");
  auto* bench_cmd = app.add_subcommand(
      "bench", "Time apgd/spgd with and without screening; writes bench CSV");
  auto* trace_cmd =
      app.add_subcommand("trace", "Run with screening and emit the per-iteration trace CSV");
  auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic dataset in libsvm format");

  for (CLI::App* cmd : {solve_cmd, bench_cmd, trace_cmd}) {
    detail::add_dataset_options(cmd, spec);
    detail::add_weight_options(cmd, spec);
    detail::add_solver_options(cmd, spec);
  }
  solve_cmd->add_option("--out", spec.out_json, "Result JSON path");
  solve_cmd->add_option("--trace-out", spec.out_trace, "Trace CSV path");
  trace_cmd->add_option("--trace-out", spec.out_trace, "Trace CSV path");
  bench_cmd->add_option("--bench-out", spec.out_bench, "Bench CSV path");
  bench_cmd->add_option("--trials", spec.trials, "Timing repetitions per variant");
  bench_cmd->add_flag("--inject-bench-disagreement", spec.inject_bench_disagreement,
                      "Corrupt one variant's coefficients (exercises the safety check)")
      ->group("");  // hidden

  detail::add_dataset_options(gen_cmd, spec);
  gen_cmd->add_option("--out", spec.out_data, "Output libsvm path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(spec);
    if (bench_cmd->parsed()) return cmd_bench(spec);
    if (trace_cmd->parsed()) return cmd_trace(spec);
    return cmd_gen(spec);
  } catch (const SafetyViolation& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

inline int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("owl");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace owl::cli
