#include <map>
#include <string>

#include <CLI11.hpp>

#include "fluxlim/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fluxlim: flux-limited junction experiments"};
  app.require_subcommand(1);
  fluxlim::cli::Invocation inv;
  std::string config, out;
  int workers = 0;
  const std::map<std::string, std::string> about{
      {"solve", "value field, density and junction trace for one control"},
      {"cost", "cost of one control"},
      {"optimize", "search for a minimizing control"},
      {"audit", "first-order optimality audit of one control"},
      {"crosscheck", "compare the density with a finite-volume solution"},
      {"reproduce-prop511", "canonical switching experiment (config optional)"}};
  for (const auto& name : fluxlim::config::commands()) {
    auto* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("--config", config, "experiment config file")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
    sub->add_option("--workers", workers, "worker threads (default: FLUXLIM_WORKERS or 1)")
        ->check(CLI::PositiveNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fluxlim::cli::kConfigError;
  }
  inv.command = app.get_subcommands().front()->get_name();
  if (!config.empty()) inv.config_path = config;
  if (!out.empty()) inv.out_dir = out;
  if (workers > 0) inv.workers = workers;
  return fluxlim::cli::run(inv);
}
