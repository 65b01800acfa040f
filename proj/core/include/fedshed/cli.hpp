#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fedshed/data.hpp"
#include "fedshed/federation.hpp"
#include "fedshed/objectives.hpp"

namespace fedshed::cli {

/*
 * A fully described experiment: algorithm, problem source, partition,
 * schedule, channel, and solver knobs. Everything randomized flows from
 * the single seed through documented per-agent, per-round substreams.
 */
struct RunConfig {
  std::string algorithm = "shed";  // shed-ls | shed | shed-periodic:T | mont-dec | giant | fednl | agd
  double mu = 1e-5;
  std::size_t agents = 4;
  std::string partition = "iid";   // iid | label-skew | two-class:TARGET
  std::string renewal;             // once | periodic:T | fib | gn:B | every ("" = algorithm default)
  std::string increment = "fixed:1";  // fixed:K | rayleigh:D0,GAMMA,NU,CAP
  double alpha = 0.1;
  double beta = 0.5;
  std::size_t rounds = 100;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string dataset = "synth:ls,200,20,100,0.1";  // csv:PATH:LABELCOL | libsvm:PATH:N | synth:KIND,N,D,COND,NOISE
  std::string out = "metrics.csv";

  bool operator==(const RunConfig&) const = default;
};

/* Parse a flat key = value document with # comments. Unknown keys and
 * out-of-range values raise std::invalid_argument naming the key. */
RunConfig parse_config(const std::string& text);

/* Overlay non-empty flag values onto `base`; values are validated the same
 * way as file keys. */
RunConfig apply_overrides(RunConfig base, const std::map<std::string, std::string>& flags);

/* Serialize a config as the same key = value document parse_config reads;
 * emit -> parse is the identity. */
std::string emit_config(const RunConfig& cfg);

/* Materialized experiment: shards, solver configuration, and which driver
 * to run. The optimum is resolved for the error columns when the objective
 * admits one cheaply. */
struct Experiment {
  std::vector<objectives::LocalData> shards;
  federation::ExperimentConfig fed;
  federation::RhoPolicy policy = federation::RhoPolicy::Convex;
  std::string driver;  // shed | giant | fednl | agd
};

/* Resolve dataset, partition, algorithm, and schedule strings into a
 * runnable experiment. Throws std::invalid_argument on malformed fields. */
Experiment build_experiment(const RunConfig& cfg);

/* Outcome of one experiment: the metrics table plus exit-status facts. */
struct RunOutcome {
  federation::RunResult result;
  std::size_t rounds_to_tolerance = 0;  // 0 = never reached
  std::size_t comm_rounds_total = 0;
  std::size_t vectors_total = 0;
  std::size_t hess_computations_total = 0;
};

/* Run the configured experiment in memory; no files are written. */
RunOutcome execute_config(const RunConfig& cfg);

/* Run the configured experiment and write the per-round CSV to cfg.out and
 * a JSON summary next to it (out path with a .json suffix). */
RunOutcome run_experiment(const RunConfig& cfg);

/* Per-round CSV with the fixed column set, written with full precision. */
std::string metrics_csv(const std::vector<federation::RoundMetrics>& rounds);

/* JSON summary: convergence flag, rounds to tolerance, and cumulative
 * totals, written deterministically. */
std::string summary_json(const RunConfig& cfg, const RunOutcome& outcome);

/* Long-format comparison table across configs: one row per run with
 * rounds-to-tolerance, total vectors, and Hessian computation counts. */
std::string compare_csv(const std::vector<RunConfig>& configs,
                        const std::vector<RunOutcome>& outcomes);

/* Exit codes shared by the command-line tools. */
inline constexpr int kExitConverged = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRoundCap = 3;

}  // namespace fedshed::cli
