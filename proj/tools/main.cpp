#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace conecusp::cli;
  CLI::App app{"Cone and cusp singularities of meromorphic one-forms"};
  app.require_subcommand(1);
  app.fallthrough();

  RunOptions opt;
  std::string config;
  std::string out;
  app.add_option("--config", config, "Instance config (JSON)");
  app.add_option("--out", out, "Directory for report and grid files");
  app.add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--tol", opt.tol_overrides, "Tolerance override NAME=VAL")->expected(1)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  app.add_option("--seed", opt.seed, "Seed for randomized check points");

  for (const auto& name : command_names()) {
    auto* sub = app.add_subcommand(name);
    if (name == "rouche") sub->add_option("n_max", opt.n_max, "Largest N")->default_val(12);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (!config.empty()) opt.config_path = config;
  if (!out.empty()) opt.out_dir = out;

  const auto outcome = run(app.get_subcommands().front()->get_name(), opt);
  std::cout << outcome.out << std::flush;
  std::cerr << outcome.err << std::flush;
  return outcome.exit_code;
}
