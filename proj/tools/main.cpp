#include "oscspec/config.hpp"

#include <CLI11.hpp>

#include <exception>
#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"oscspec: Prufer-variable and small-divisor workbench for decaying oscillatory potentials"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  for (const char* name : {"verify", "simulate", "scan", "bound", "discrete", "holder"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides config out_dir)");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    oscspec::Config cfg = oscspec::load_config(config_path);
    return oscspec::run_command(app.get_subcommands().front()->get_name(), cfg, out_dir);
  } catch (const oscspec::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
