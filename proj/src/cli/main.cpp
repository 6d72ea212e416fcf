#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "qecgrad/cli.hpp"
#include "qecgrad/error.hpp"

namespace qecgrad::cli {

namespace {

struct Flags {
  std::string config;
  std::string preset;
  std::string out = ".";
  std::optional<double> delta;
  std::optional<std::size_t> threads;
  std::optional<std::string> code;
  std::optional<std::size_t> steps;
  bool calibrate = false;
};

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config file " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("config file " + path + ": " + e.what());
  }
}

RunConfig assemble(const std::string& command, const Flags& f) {
  RunConfig cfg;
  cfg.command = command;
  cfg.doc = default_config();
  if (!f.preset.empty()) {
    const nlohmann::json p = preset(f.preset);
    check_keys(p);
    cfg.doc = merge(cfg.doc, p);
  }
  if (!f.config.empty()) {
    const nlohmann::json file = read_json_file(f.config);
    check_keys(file);
    cfg.doc = merge(cfg.doc, file);
  }
  if (f.delta) cfg.doc["delta"] = *f.delta;
  if (f.threads) cfg.doc["threads"] = *f.threads;
  if (f.code) cfg.doc["code"] = *f.code;
  if (f.steps) cfg.doc["steps"] = *f.steps;
  cfg.threads = cfg.doc.at("threads").get<std::size_t>();
  cfg.out_dir = f.out;
  cfg.calibrate = f.calibrate;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient-based optimization of quantum error-correcting codewords"};
  app.require_subcommand(1);
  Flags flags;

  struct Command {
    const char* name;
    const char* help;
    CommandResult (*run)(const RunConfig&);
    bool calibrate;
  };
  const Command commands[] = {
      {"sanity", "Repetition-code gradient symmetry checks and step-size convergence", cmd_sanity, true},
      {"gradscan", "Gradient norms of a code across noise strengths", cmd_gradscan, false},
      {"optimize", "Plain or stabilized gradient descent on the codewords", cmd_optimize, false},
      {"eval", "Fidelity and loss breakdown of a code", cmd_eval, true},
  };
  for (const Command& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", flags.config, "Run config JSON file")->check(CLI::ExistingFile);
    sub->add_option("--preset", flags.preset, "Shipped preset name");
    sub->add_option("--out", flags.out, "Output directory");
    sub->add_option("--delta", flags.delta, "Finite-difference step");
    sub->add_option("--threads", flags.threads, "Gradient worker threads (0 = all cores)");
    sub->add_option("--code", flags.code, "Standard code name or code file");
    if (std::string(c.name) == "optimize") sub->add_option("--steps", flags.steps, "Optimizer steps");
    if (c.calibrate) sub->add_flag("--calibrate", flags.calibrate, "Scan configurations against the reference values");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  for (const Command& c : commands) {
    if (!app.got_subcommand(c.name)) continue;
    try {
      const RunConfig cfg = assemble(c.name, flags);
      std::filesystem::create_directories(cfg.out_dir);
      const CommandResult r = c.run(cfg);
      if (std::string(c.name) == "eval") std::cout << r.report.dump(2) << "\n";
      std::cerr << c.name << ": " << (r.pass ? "ok" : "FAILED") << " (" << (cfg.out_dir / "report.json").string()
                << ")\n";
      return r.pass ? 0 : 1;
    } catch (const std::exception& e) {
      std::cerr << c.name << ": error: " << e.what() << "\n";
      return 2;
    }
  }
  return 2;
}

}  // namespace qecgrad::cli
