#pragma once

// Command-line front end: run configuration, presets, and the sanity,
// gradscan, optimize and eval commands.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qecgrad/channels.hpp"
#include "qecgrad/code.hpp"
#include "qecgrad/gradient.hpp"
#include "qecgrad/objective.hpp"
#include "qecgrad/optimizer.hpp"
#include "qecgrad/recovery.hpp"

namespace qecgrad::cli {

/// Built-in defaults for every key a run config may set.
nlohmann::json default_config();

/// Names of the shipped presets and their JSON text.
std::vector<std::string> preset_names();
nlohmann::json preset(std::string_view name);

/// Objects merge key by key, anything else replaces.
nlohmann::json merge(nlohmann::json base, const nlohmann::json& overlay);

/// Throws FormatError naming the first key that default_config() lacks.
void check_keys(const nlohmann::json& doc);

struct RunConfig {
  std::string command;
  nlohmann::json doc;  // defaults < preset < config file < flags
  std::filesystem::path out_dir = ".";
  std::size_t threads = 1;
  bool calibrate = false;

  Code code() const;
  std::optional<Code> anchor_code() const;
  /// The "channel" block; qubits defaults to the qubit count of `for_code`.
  ChannelSpec channel(const Code& for_code) const;
  RecoverySpec recovery() const;
  FidelitySpec fidelity() const;
  FDConfig fd() const;
  OptimizerConfig optimizer() const;
};

/// Standard code name, or a code file path (tried as given, then in the data directory).
Code resolve_code(const std::string& ref);

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Polyline plot with axes and a legend; no timestamps.
std::string svg_plot(const std::string& title, const std::string& xlabel,
                     const std::string& ylabel, const std::vector<Series>& series,
                     bool log_x = false);

struct CommandResult {
  nlohmann::json report;
  bool pass = true;
};

CommandResult cmd_sanity(const RunConfig& cfg);
CommandResult cmd_gradscan(const RunConfig& cfg);
CommandResult cmd_optimize(const RunConfig& cfg);
CommandResult cmd_eval(const RunConfig& cfg);

/// Per-codeword gradient norms of the configured fidelity. A per-codeword
/// spec is applied to each codeword in turn.
std::vector<double> codeword_gradient_norms(const Code& code, const QuantumChannel& noise,
                                            const QuantumChannel& recovery,
                                            const FidelitySpec& spec, const FDConfig& fd,
                                            std::size_t threads);

/// Program entry; returns the process exit status.
int main(int argc, char** argv);

}  // namespace qecgrad::cli
