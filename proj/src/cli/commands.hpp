#ifndef DELAYGP_CLI_COMMANDS_HPP
#define DELAYGP_CLI_COMMANDS_HPP

#include <filesystem>
#include <string>

#include "delaygp/config.hpp"

namespace delaygp::cli {

// Each command validates its full configuration before computing anything,
// writes its outputs plus one manifest.json into <output.dir>, and returns
// the process exit code.
int run_simulate(ConfigMap cfg);
int run_scan(ConfigMap cfg);
int run_sample(ConfigMap cfg);
int run_convergence(ConfigMap cfg);
int run_appendix(ConfigMap cfg);
int run_plot(ConfigMap cfg);

// Re-executes the command recorded in a manifest; output is byte-identical.
int run_rerun(const std::filesystem::path& manifest_file);

int dispatch(const std::string& command, ConfigMap cfg);

}  // namespace delaygp::cli

#endif
