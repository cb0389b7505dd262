// Command-line front end: bicmb {ber|pep|analyze|correlate} --config FILE

#include <iostream>

#include "CLI11.hpp"
#include "bicmb/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"BICMB-OFDM link simulator and diversity analyzer"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> workers;

  for (const char* name : {"ber", "pep", "analyze", "correlate"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--seed", seed, "master seed (overrides config)");
    sub->add_option("--out", out, "output directory (overrides config)");
    sub->add_option("--workers", workers, "worker threads (overrides config)");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    const auto mode = bicmb::mode_from_string(app.get_subcommands().front()->get_name());
    auto file = bicmb::ConfigFile::load(config_path);
    if (seed) file.set("seed", std::to_string(*seed));
    if (out) file.set("out", *out);
    if (workers) file.set("workers", std::to_string(*workers));
    const auto config = bicmb::experiment_from(file, mode);
    bicmb::run(config);
    std::cout << "wrote " << config.out_dir << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
