#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sns/commands.hpp"
#include "sns/errors.hpp"

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> out;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config file (a manifest.json also works)");
  sub->add_option("--seed", f.seed, "root seed, overrides the config");
  sub->add_option("--workers", f.workers, "worker threads, 0 = hardware concurrency");
  sub->add_option("--out", f.out, "output directory, overrides the config");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sns2d: stochastic 2D Navier-Stokes experiments"};
  app.require_subcommand(1);
  Flags flags;
  for (const char* name : {"simulate", "verify", "estimate", "toy"}) {
    auto* sub = app.add_subcommand(name);
    add_flags(sub, flags);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return sns::kExitConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    nlohmann::json doc = nlohmann::json::object();
    if (!flags.config.empty()) {
      std::ifstream in(flags.config);
      if (!in) throw sns::ConfigError("cannot open config file '" + flags.config + "'");
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw sns::ConfigError("config file '" + flags.config + "' is not valid JSON: " + e.what());
      }
      if (doc.is_object() && doc.contains("manifest") && doc["manifest"].is_object() &&
          doc["manifest"].contains("command") && doc["manifest"]["command"] != command)
        throw sns::ConfigError("manifest was written by '" + doc["manifest"]["command"].get<std::string>() +
                               "', not '" + command + "'");
    }
    if (flags.seed) doc["seed"] = *flags.seed;
    if (flags.workers) doc["workers"] = *flags.workers;
    if (flags.out) doc["out"] = *flags.out;
    const sns::RunConfig cfg = sns::parse_config(doc, command);
    const sns::CommandResult res = sns::run_command(cfg);
    std::cout << command << ": " << res.status << " -> " << cfg.out << "\n";
    return res.exit_code;
  } catch (const sns::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return sns::kExitConfigError;
  } catch (const sns::BlowUpError& e) {
    std::cerr << "blow-up: " << e.what() << "\n";
    return sns::kExitBlowUp;
  }
}
