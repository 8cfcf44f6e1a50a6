#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "oscneg/config.hpp"
#include "oscneg/experiments.hpp"

namespace {

struct SubcommandArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<std::string> out;
  std::optional<int> workers;
};

void add_common_options(CLI::App* cmd, SubcommandArgs& args, bool config_required) {
  auto* opt = cmd->add_option("--config", args.config_path, "experiment config file");
  if (config_required) opt->required();
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&args](std::uint64_t v) { args.seed = v; }, "override experiment.seed");
  cmd->add_option_function<int>(
      "--samples", [&args](int v) { args.samples = v; }, "override experiment.samples");
  cmd->add_option_function<std::string>(
      "--out", [&args](const std::string& v) { args.out = v; },
      "override the output prefix");
  cmd->add_option_function<int>(
      "--workers", [&args](int v) { args.workers = v; }, "override the worker count");
}

int run(oscneg::ExperimentType type, const SubcommandArgs& args) {
  using namespace oscneg;
  ConfigFile file = args.config_path.empty()
                        ? ConfigFile::parse_string("[experiment]\ntype = selfcheck\n",
                                                   "<builtin>")
                        : ConfigFile::parse_file(args.config_path);
  CliOverrides overrides{args.seed, args.samples, args.out, args.workers};
  ExperimentConfig cfg = load_experiment_config(file, type, overrides);
  return run_experiment(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Disorder-averaged logarithmic negativity experiments for oscillator graphs"};
  app.require_subcommand(1);

  SubcommandArgs area_args, thermal_args, correlator_args, selfcheck_args;
  CLI::App* area = app.add_subcommand("area-law", "negativity/entropy volume sweep");
  add_common_options(area, area_args, true);
  CLI::App* thermal = app.add_subcommand("thermal", "negativity sweep over beta");
  add_common_options(thermal, thermal_args, true);
  CLI::App* correlator =
      app.add_subcommand("correlator", "eigenfunction correlator decay and fit");
  add_common_options(correlator, correlator_args, true);
  CLI::App* selfcheck = app.add_subcommand("selfcheck", "run the built-in invariant suite");
  add_common_options(selfcheck, selfcheck_args, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (area->parsed()) return run(oscneg::ExperimentType::area_law, area_args);
    if (thermal->parsed()) return run(oscneg::ExperimentType::thermal_sweep, thermal_args);
    if (correlator->parsed())
      return run(oscneg::ExperimentType::correlator, correlator_args);
    return run(oscneg::ExperimentType::selfcheck, selfcheck_args);
  } catch (const oscneg::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const oscneg::all_samples_rejected& e) {
    std::cerr << e.what() << "\n";
    return 4;
  } catch (const oscneg::numerical_error& e) {
    std::cerr << "invariant failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
