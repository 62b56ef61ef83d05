// Command-line driver: sbpnls <run|converge|error-growth|bench|conformance> ...
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sbpnls/errors.hpp"
#include "sbpnls/experiments.hpp"
#include "sbpnls/kernels.hpp"

int main(int argc, char** argv) {
  using namespace sbpnls;
  CLI::App app{"Structure-preserving NLS solvers with relaxation"};
  app.require_subcommand(1);

  std::string output;
  int threads = 1;
  std::size_t jobs = 1;
  unsigned seed = 20240917;
  app.add_option("--output", output, "Output directory (default: config output, then $SBPNLS_OUTPUT_DIR, then ./out)");
  app.add_option("--threads", threads, "OpenMP threads for the vector kernels")->check(CLI::PositiveNumber);
  app.add_option("--jobs", jobs, "Worker threads for sweep points")->check(CLI::PositiveNumber);

  std::string config_path;
  std::vector<std::string> bench_paths;

  auto* run = app.add_subcommand("run", "Integrate one configuration");
  run->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  auto* converge = app.add_subcommand("converge", "Convergence sweep over space, time or tau");
  converge->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  auto* growth = app.add_subcommand("error-growth", "Error against time with and without relaxation");
  growth->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  auto* bench = app.add_subcommand("bench", "Best-of-N runtimes and errors");
  bench->add_option("--config", bench_paths, "Config files")->required()->check(CLI::ExistingFile);
  auto* conformance = app.add_subcommand("conformance", "SBP property checks for every operator set");
  conformance->add_option("--seed", seed, "Seed for the randomized grid sizes");

  CLI11_PARSE(app, argc, argv);
  kernels::set_num_threads(threads);
  const std::optional<std::string> explicit_out =
      output.empty() ? std::nullopt : std::optional<std::string>(output);

  try {
    if (*run || *converge || *growth) {
      RunConfig config = load_config(config_path);
      const auto out = resolve_output_dir(config, explicit_out);
      if (*run) return cmd_run(config, out, std::cout);
      if (*converge) return cmd_converge(config, out, jobs, std::cout);
      return cmd_error_growth(config, out, jobs, std::cout);
    }
    if (*bench) {
      std::vector<RunConfig> configs;
      for (const auto& p : bench_paths) configs.push_back(load_config(p));
      return cmd_bench(configs, resolve_output_dir(configs.front(), explicit_out), std::cout);
    }
    RunConfig defaults;
    return cmd_conformance(seed, resolve_output_dir(defaults, explicit_out), std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
