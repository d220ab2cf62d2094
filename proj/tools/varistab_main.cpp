#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "varistab/errors.hpp"
#include "varistab/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"varistab: stability checks for generalized equations and parametric optimization"};
  std::string config, command, out, format = "text";
  std::optional<std::uint64_t> seed;
  app.add_option("-c,--config", config, "JSON run configuration")->required();
  app.add_option("--command", command, "override the command in the configuration");
  app.add_option("--seed", seed, "override the RNG seed");
  app.add_option("-o,--out", out, "directory for report files");
  app.add_option("-f,--format", format, "files to write: text, json, csv or all")
      ->check(CLI::IsMember({"text", "json", "csv", "all"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    varistab::RunOptions opts;
    if (!command.empty()) opts.command = command;
    opts.seed = seed;
    const varistab::RunReport report = varistab::run_config_file(config, opts);
    std::cout << report.text;
    if (!out.empty()) varistab::emit_report(report, out, format);
    return report.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
