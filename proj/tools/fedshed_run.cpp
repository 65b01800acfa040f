// Runs one federated optimization experiment from a config file and/or
// flags, writing per-round metrics (CSV) and a JSON summary.
//
// Exit codes: 0 converged, 1 runtime failure, 2 usage error, 3 round cap
// reached before the gradient tolerance.

#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "fedshed/cli.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated Newton-type optimization runner"};
  app.get_formatter()->column_width(34);

  std::string config_path;
  std::map<std::string, std::string> flags;
  auto add = [&](const std::string& name, const std::string& key, const std::string& help) {
    app.add_option_function<std::string>(
           name, [&flags, key](const std::string& v) { flags[key] = v; }, help)
        ->type_name(key == "out" ? "PATH" : "VALUE");
  };
  app.add_option("--config", config_path, "key = value config file; flags override it")
      ->type_name("PATH");
  add("--algorithm", "algorithm",
      "shed-ls | shed | shed-periodic:T | mont-dec | giant | fednl | agd");
  add("--mu", "mu", "ridge strength, >= 0");
  add("--agents", "agents", "number of agents, >= 1");
  add("--partition", "partition", "iid | iid:TARGET | label-skew | two-class:TARGET");
  add("--renewal", "renewal", "once | periodic:T | fib | gn:B | every");
  add("--increment", "increment", "fixed:K | rayleigh:D0,GAMMA,NU,CAP");
  add("--alpha", "alpha", "sufficient-decrease slope, in (0, 0.5)");
  add("--beta", "beta", "backtracking shrink factor, in (0, 1)");
  add("--rounds", "rounds", "round cap, >= 1");
  add("--tol", "tol", "gradient-norm stopping tolerance");
  add("--seed", "seed", "master seed for data, partition, and channel draws");
  add("--threads", "threads", "worker threads for agent-local computation");
  add("--dataset", "dataset", "csv:PATH:LABELCOL | libsvm:PATH:N | synth:KIND,N,D,COND,NOISE");
  add("--out", "out", "metrics CSV path; the JSON summary lands at PATH.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return fedshed::cli::kExitUsage;
  }

  try {
    fedshed::cli::RunConfig cfg;
    if (!config_path.empty()) cfg = fedshed::cli::parse_config(read_file(config_path));
    cfg = fedshed::cli::apply_overrides(cfg, flags);
    auto outcome = fedshed::cli::run_experiment(cfg);
    std::cout << fedshed::cli::summary_json(cfg, outcome);
    return outcome.result.converged ? fedshed::cli::kExitConverged
                                    : fedshed::cli::kExitRoundCap;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return fedshed::cli::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return fedshed::cli::kExitRuntime;
  }
}
