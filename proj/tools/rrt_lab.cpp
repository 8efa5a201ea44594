// rrt-lab: run one named experiment and write its CSV and JSON summary.
//
// Exit codes: 0 all checks passed, 1 a tolerance check failed, 2 bad usage or
// configuration, 3 runtime failure (I/O, resource caps).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rrt/config.hpp"
#include "rrt/error.hpp"
#include "rrt/harness.hpp"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random recursive trees in a random environment: simulation and verification experiments"};
  std::string experiment;
  std::string config_path;
  std::string out;
  std::string plot_out;
  std::vector<std::string> overrides;
  std::string n, reps, seed, threads;

  app.add_option("experiment", experiment,
                 "depth-law | depth-exact-check | arcsine | outdeg-profile | scaling | subcritical | texpect | "
                 "sanity | bench")
      ->required();
  app.add_option("--config", config_path, "TOML-style experiment file")->check(CLI::ExistingFile);
  app.add_option("--n", n, "number of vertices / walk length");
  app.add_option("--reps", reps, "replicates");
  app.add_option("--seed", seed, "64-bit experiment seed (mandatory here or in the config)");
  app.add_option("--threads", threads, "worker threads (fallback: RRT_LAB_THREADS)");
  app.add_option("--out", out, "CSV path; the summary goes to the same path with a .json extension");
  app.add_option("--plot-out", plot_out, "also write plot-ready CSV (arcsine and outdeg-profile only)");
  app.add_option("--set", overrides, "override any config key, e.g. --set env.model=constant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    rrt::ConfigMap values = config_path.empty() ? rrt::ConfigMap{} : rrt::load_config_file(config_path);
    if (values.contains("experiment") && values["experiment"] != experiment)
      throw rrt::UsageError("config file is for experiment '" + values["experiment"] + "'");
    values["experiment"] = experiment;
    if (!values.contains("threads"))
      if (const char* env = std::getenv("RRT_LAB_THREADS")) values["threads"] = env;
    for (const auto& o : overrides) rrt::apply_override(values, o);
    const std::pair<const char*, const std::string*> flags[] = {
        {"n", &n}, {"reps", &reps}, {"seed", &seed}, {"threads", &threads}, {"out", &out}};
    for (const auto& [key, value] : flags)
      if (!value->empty()) values[key] = *value;

    const rrt::ExperimentConfig config = rrt::make_config(values);
    const rrt::ExperimentResult result = rrt::run_experiment(config);

    if (config.out.empty()) {
      rrt::write_csv(std::cout, result.table);
      std::cerr << result.summary_json << '\n';
    } else {
      rrt::write_outputs(result, config.out);
      std::cerr << result.summary_json << '\n';
    }
    if (!plot_out.empty()) {
      std::ofstream plot(plot_out, std::ios::binary);
      if (!plot) throw rrt::IoError("cannot write " + plot_out);
      rrt::write_csv(plot, rrt::emit_plot_data(result.table, rrt::experiment_name(config.experiment)));
    }
    return result.passed ? 0 : kExitFail;
  } catch (const rrt::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const rrt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
