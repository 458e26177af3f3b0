// Command-line front end: gen-graph, run, ensemble, sweep, presets.

#include <CLI11.hpp>

#include <iostream>

#include "ngsim/errors.hpp"
#include "ngsim/experiment.hpp"
#include "ngsim/format.hpp"

namespace {

struct CommonOptions {
  std::string preset;
  std::string config_file;
  std::vector<std::string> overrides;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> workers;
  std::optional<double> max_time;
};

void add_common(CLI::App* sub, CommonOptions& o, const std::string& out_help, bool out_required = true) {
  sub->add_option("--preset", o.preset, "Built-in experiment preset (see `ngsim presets`)");
  sub->add_option("-c,--config", o.config_file, "key=value configuration file")->check(CLI::ExistingFile);
  sub->add_option("-s,--set", o.overrides, "Override a setting, e.g. --set topology.n=2048");
  auto* out = sub->add_option("-o,--out", o.out, out_help);
  if (out_required) out->required();
  sub->add_option("--seed", o.seed, "Master seed (run.seed)");
  sub->add_option("--runs", o.runs, "Realizations per ensemble (run.runs)");
  sub->add_option("--workers", o.workers, "Concurrent realizations (run.workers)");
  sub->add_option("--max-time", o.max_time, "Time limit per run (run.max_time)");
}

ngsim::ExperimentConfig resolve(const CommonOptions& o) {
  std::vector<std::string> overrides = o.overrides;
  if (o.seed) overrides.push_back("run.seed=" + std::to_string(*o.seed));
  if (o.runs) overrides.push_back("run.runs=" + std::to_string(*o.runs));
  if (o.workers) overrides.push_back("run.workers=" + std::to_string(*o.workers));
  if (o.max_time) overrides.push_back("run.max_time=" + ngsim::format_double(*o.max_time));
  return ngsim::load_config(o.preset.empty() ? std::nullopt : std::optional(o.preset),
                            o.config_file.empty() ? std::nullopt : std::optional<std::filesystem::path>(o.config_file),
                            overrides);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Naming game simulator on random geometric and small-world graphs"};
  app.require_subcommand(1);

  CommonOptions gen, single, ensemble, sweep;
  auto* gen_cmd = app.add_subcommand("gen-graph", "Generate one graph and write it as an edge list");
  add_common(gen_cmd, gen, "Output graph file");
  auto* run_cmd = app.add_subcommand("run", "Single run with time series and optional snapshots");
  add_common(run_cmd, single, "Output directory");
  auto* ens_cmd = app.add_subcommand("ensemble", "Ensemble of independent realizations");
  add_common(ens_cmd, ensemble, "Output directory");
  auto* sweep_cmd = app.add_subcommand("sweep", "Ensembles over a list of n or p values");
  add_common(sweep_cmd, sweep, "Output directory");
  auto* presets_cmd = app.add_subcommand("presets", "List built-in presets");
  std::string show;
  presets_cmd->add_option("name", show, "Print the settings of one preset");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ngsim::ExitCode::config_error;
  }

  if (presets_cmd->parsed()) {
    try {
      if (show.empty())
        for (const auto& name : ngsim::preset_names()) std::cout << name << '\n';
      else
        std::cout << ngsim::preset_text(show);
      return ngsim::ExitCode::ok;
    } catch (const ngsim::ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return ngsim::ExitCode::config_error;
    }
  }

  try {
    if (gen_cmd->parsed()) return ngsim::cmd_gen_graph(resolve(gen), gen.out, std::cout);
    if (run_cmd->parsed()) return ngsim::cmd_run(resolve(single), single.out, std::cout);
    if (ens_cmd->parsed()) return ngsim::cmd_ensemble(resolve(ensemble), ensemble.out, std::cout);
    if (sweep_cmd->parsed()) return ngsim::cmd_sweep(resolve(sweep), sweep.out, std::cout);
  } catch (const ngsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return ngsim::ExitCode::config_error;
  }
  return ngsim::ExitCode::config_error;
}
