// kinlab: command-line front end.
//
//   kinlab <command> [--config FILE] [--set section.key=value]... [--out PATH] [--format csv|json]

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "kinlab/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Kinetic linear Boltzmann lab"};
  app.require_subcommand(0, 1);
  app.fallthrough();  // inherited by subcommands: options may follow the command

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_path, format;
  bool list = false;
  app.add_option("-c,--config", config_path, "configuration file")->check(CLI::ExistingFile);
  app.add_option("-s,--set", overrides, "override, e.g. drive.chi=0.2 (repeatable)");
  app.add_option("-o,--out", out_path, "output table path (summary goes next to it as .json)");
  app.add_option("-f,--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("--list", list, "print the available commands");

  std::string command;
  for (const auto& name : kinlab::command_names()) {
    auto* sub = app.add_subcommand(name, "run " + name);
    sub->callback([&command, name] { command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kinlab::kExitConfig;
  }
  if (list) {
    for (const auto& name : kinlab::command_names()) std::cout << name << '\n';
    return 0;
  }
  if (command.empty()) {
    std::cerr << app.help();
    return kinlab::kExitConfig;
  }

  std::string text;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  if (!out_path.empty()) overrides.push_back("output.path=" + out_path);
  if (!format.empty()) overrides.push_back("output.format=" + format);

  kinlab::RunConfig config;
  try {
    config = kinlab::parse_config(text, overrides);
  } catch (const kinlab::ConfigError& e) {
    std::cerr << (config_path.empty() ? std::string("config") : config_path) << ": " << e.what() << '\n';
    return kinlab::kExitConfig;
  }
  return kinlab::dispatch(command, config, std::cout, std::cerr);
}
