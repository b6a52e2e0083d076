#include "bfspec/cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace bfspec;
  CLI::App app{"Spectral experiments on B-free point sets"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::string out_path;
  std::optional<std::int64_t> field_d;

  for (const auto& name : cli::command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("-c,--config", config_path, "TOML or JSON configuration file");
    sub->add_option("--set", sets, "override a config key: key.path=value")->allow_extra_args(false);
    sub->add_option("-o,--out", out_path, "output file (sets output.path)");
    if (name == "field-info") sub->add_option("--d", field_d, "square-free d of Q(sqrt(d))");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  io::json cfg = io::json::object();
  try {
    if (!config_path.empty()) cfg = io::load_config(config_path);
    for (const auto& s : sets) io::apply_override(cfg, s);
    if (!out_path.empty()) cfg["output"]["path"] = out_path;
    if (field_d) cfg["field"]["d"] = *field_d;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return cli::kConfigError;
  }
  return cli::run_guarded(command, cfg, std::cout, std::cerr);
}
