#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cli/commands.hpp"
#include "delaygp/errors.hpp"
#include "delaygp/manifest.hpp"

namespace {

struct CommonArgs {
  std::string config_file;
  std::vector<std::string> overrides;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("-c,--config", args->config_file,
                  "TOML config file (see README for the accepted subset)");
  cmd->add_option("-s,--set", args->overrides,
                  "override a config key, e.g. --set grid.n_data=50");
  cmd->add_option("-o,--out", args->out_dir,
                  "output directory (same as --set output.dir=...)");
}

delaygp::ConfigMap build_config(const CommonArgs& args) {
  delaygp::ConfigMap cfg;
  if (!args.config_file.empty())
    cfg = delaygp::ConfigMap::parse_file(args.config_file);
  for (const std::string& o : args.overrides) cfg.apply_override(o);
  if (!args.out_dir.empty()) cfg.set("output.dir", args.out_dir);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(delaygp::kToolVersion) +
               " - time-delay likelihood toolkit for paired light curves"};
  app.require_subcommand(1);
  app.set_version_flag("--version", delaygp::kToolVersion);

  std::map<std::string, CommonArgs> args;
  for (const char* name : {"simulate", "scan", "sample", "convergence",
                           "appendix", "plot"}) {
    CLI::App* cmd = app.add_subcommand(name);
    add_common(cmd, &args[name]);
  }
  app.get_subcommand("simulate")
      ->description("draw synthetic light-curve pairs from the joint GP");
  app.get_subcommand("scan")->description(
      "delay scans: data-averaged (analytic) or for a light-curve file pair");
  app.get_subcommand("sample")
      ->description("posterior sampling with nested sampling or tempered SMC");
  app.get_subcommand("convergence")
      ->description("unconverged-fraction study with the Laplace diagnostic");
  app.get_subcommand("appendix")
      ->description("closed-form checks: lengthscale, moments, "
                    "bayes-spectrum, condition");
  app.get_subcommand("plot")->description("render a CSV as a line-plot SVG");

  std::string rerun_manifest;
  CLI::App* rerun = app.add_subcommand(
      "rerun", "re-execute a previous run from its manifest.json");
  rerun->add_option("manifest", rerun_manifest, "path to manifest.json")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    // CLI11 returns 0 for --help/--version; anything else is bad usage.
    return code == 0 ? 0 : delaygp::ConfigError::exit_code;
  }

  try {
    if (rerun->parsed()) return delaygp::cli::run_rerun(rerun_manifest);
    for (const auto& [name, common] : args) {
      CLI::App* cmd = app.get_subcommand(name);
      if (cmd->parsed())
        return delaygp::cli::dispatch(name, build_config(common));
    }
    std::cerr << "no command given\n";
    return delaygp::ConfigError::exit_code;
  } catch (const delaygp::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return delaygp::ConfigError::exit_code;
  } catch (const delaygp::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return delaygp::IoError::exit_code;
  } catch (const delaygp::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return delaygp::NumericalError::exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return delaygp::NumericalError::exit_code;
  }
}
