// Runs several experiment configs and emits one long-format CSV row per
// run: rounds to tolerance, total vectors transmitted, and Hessian
// computation counts, ready for plotting.
//
// Exit codes: 0 table written, 1 runtime failure, 2 usage error.

#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

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
  CLI::App app{"Side-by-side comparison of federated optimization runs"};

  std::vector<std::string> config_paths;
  std::string out_path;
  app.add_option("configs", config_paths, "config files, one run per file")
      ->required()
      ->type_name("PATH");
  app.add_option("--out", out_path, "write the table here instead of stdout")->type_name("PATH");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return fedshed::cli::kExitUsage;
  }

  try {
    std::vector<fedshed::cli::RunConfig> configs;
    std::vector<fedshed::cli::RunOutcome> outcomes;
    configs.reserve(config_paths.size());
    for (const auto& path : config_paths)
      configs.push_back(fedshed::cli::parse_config(read_file(path)));
    for (const auto& cfg : configs) outcomes.push_back(fedshed::cli::execute_config(cfg));
    auto table = fedshed::cli::compare_csv(configs, outcomes);
    if (out_path.empty()) {
      std::cout << table;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open output file " + out_path);
      out << table;
      if (!out.flush()) throw std::runtime_error("failed writing " + out_path);
    }
    return fedshed::cli::kExitConverged;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return fedshed::cli::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return fedshed::cli::kExitRuntime;
  }
}
