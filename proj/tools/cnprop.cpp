// Command-line driver: runs configured scenarios and streams JSON-lines records.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cnprop/error.hpp"
#include "cnprop/scenario.hpp"

namespace {

struct RunOptions {
  std::string config_path;
  std::string preset;
  std::vector<std::string> overrides;
  std::string output;
  std::string strategy;
  std::size_t frame_stride = 0;
};

cnprop::RunConfig resolve_config(const RunOptions& opts) {
  cnprop::RunConfig config;
  if (!opts.preset.empty()) config = cnprop::find_preset(opts.preset).config;
  if (!opts.config_path.empty()) config = cnprop::load_config_file(opts.config_path, config);
  for (const auto& item : opts.overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw cnprop::Error(cnprop::ErrorCode::ConfigError,
                          "--set expects key=value, got '" + item + "'");
    }
    cnprop::set_config_value(config, item.substr(0, eq), item.substr(eq + 1));
  }
  if (!opts.strategy.empty()) cnprop::set_config_value(config, "run.strategy", opts.strategy);
  if (opts.frame_stride) config.frame_stride = opts.frame_stride;
  if (!opts.output.empty()) config.output = opts.output;
  return config;
}

int do_run(const RunOptions& opts) {
  const cnprop::RunConfig config = resolve_config(opts);
  std::ofstream file;
  if (!config.output.empty() && config.output != "-") {
    file.open(config.output);
    if (!file) {
      throw cnprop::Error(cnprop::ErrorCode::ConfigError,
                          "cannot open output file '" + config.output + "'");
    }
  }
  std::ostream& out = file.is_open() ? static_cast<std::ostream&>(file) : std::cout;
  cnprop::JsonLinesWriter writer(out);
  const cnprop::RunReport report = cnprop::run(config, &writer);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  return 0;
}

int do_presets(const std::string& write_dir) {
  if (write_dir.empty()) {
    for (const auto& p : cnprop::list_presets()) {
      std::cout << p.name << "  " << p.description << '\n';
    }
    return 0;
  }
  std::filesystem::create_directories(write_dir);
  for (const auto& p : cnprop::list_presets()) {
    const auto path = std::filesystem::path(write_dir) / (p.name + ".conf");
    std::ofstream out(path);
    out << "# " << p.description << '\n' << cnprop::serialize_config(p.config);
    if (!out) {
      throw cnprop::Error(cnprop::ErrorCode::ConfigError,
                          "cannot write '" + path.string() + "'");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crank-Nicolson propagation of the 1D Schroedinger equation"};
  app.require_subcommand(1);

  RunOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario and emit JSON-lines records");
  run_cmd->add_option("-c,--config", run_opts.config_path, "Key-value config file")
      ->check(CLI::ExistingFile);
  run_cmd->add_option("-p,--preset", run_opts.preset, "Start from a named preset");
  run_cmd->add_option("-s,--set", run_opts.overrides, "Override one key (key=value)");
  run_cmd->add_option("-o,--output", run_opts.output, "Output file ('-' for stdout)");
  run_cmd->add_option("--strategy", run_opts.strategy, "Step strategy")
      ->check(CLI::IsMember({"dense", "solve"}));
  run_cmd->add_option("--frame-stride", run_opts.frame_stride, "Steps between frames")
      ->check(CLI::PositiveNumber);

  std::string write_dir;
  auto* presets_cmd = app.add_subcommand("presets", "List presets or write them as config files");
  presets_cmd->add_option("-w,--write", write_dir, "Directory to write <name>.conf files into");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return do_run(run_opts);
    return do_presets(write_dir);
  } catch (const cnprop::Error& e) {
    cnprop::JsonLinesWriter(std::cerr).error(cnprop::to_string(e.code()), e.what());
    return e.code() == cnprop::ErrorCode::ConfigError ? 2 : 1;
  } catch (const std::exception& e) {
    cnprop::JsonLinesWriter(std::cerr).error("Internal", e.what());
    return 1;
  }
}
