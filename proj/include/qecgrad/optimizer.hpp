#pragma once

// Plain gradient descent with Gram-Schmidt projection, and stabilized descent
// on the penalty loss. Both update a <- a - lr (df/dx + i df/dy).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qecgrad/channels.hpp"
#include "qecgrad/code.hpp"
#include "qecgrad/gradient.hpp"
#include "qecgrad/objective.hpp"
#include "qecgrad/recovery.hpp"

namespace qecgrad {

struct OptimizerConfig {
  enum class Mode { Plain, Stabilized };

  Mode mode = Mode::Plain;
  double learning_rate = 1e-3;
  std::size_t steps = 0;
  FDConfig fd{};
  LossParams loss{};  // Stabilized only
  FidelitySpec fidelity{};
  RecoverySpec recovery{};
  std::optional<std::uint64_t> seed;
  double gradient_noise = 0.0;
  /// Stabilized: add the analytic penalty gradient to a finite-difference
  /// gradient of (1 - F)^2. False differentiates the whole loss numerically.
  bool analytic_penalty = true;
  /// Gram-Schmidt after every update; defaults to on for Plain, off for Stabilized.
  std::optional<bool> project;
  std::size_t threads = 1;

  bool projects() const { return project.value_or(mode == Mode::Plain); }
  void validate() const;
};

std::string_view to_string(OptimizerConfig::Mode mode);

struct StepRecord {
  std::size_t step = 0;
  double fidelity = 0.0;
  LossBreakdown loss{};
  double grad_norm = 0.0;
  double max_ortho = 0.0;
  double max_norm_dev = 0.0;
};

struct Trajectory {
  std::vector<StepRecord> steps;  // steps + 1 entries on success
  std::vector<Code> snapshots;    // code at each recorded step
  Code initial_code;
  Code final_code;
  nlohmann::json config;
  std::optional<std::string> error;

  bool ok() const { return !error.has_value(); }
};

Trajectory plain_gd(const Code& code, const QuantumChannel& noise, const OptimizerConfig& cfg);
Trajectory stabilized_gd(const Code& code, const QuantumChannel& noise,
                         const OptimizerConfig& cfg);
/// Dispatches on cfg.mode.
Trajectory optimize(const Code& code, const QuantumChannel& noise, const OptimizerConfig& cfg);

/// One evaluation. The recovery is built from `anchor` when given (a frozen
/// recovery from an earlier code), otherwise from `code`. Plain mode reports
/// zero penalty weights.
LossBreakdown evaluate_code(const Code& code, const QuantumChannel& noise,
                            const OptimizerConfig& cfg,
                            const std::optional<Code>& anchor = std::nullopt);

nlohmann::json optimizer_config_to_json(const OptimizerConfig& cfg);
nlohmann::json trajectory_to_json(const Trajectory& t);
std::string trajectory_to_csv(const Trajectory& t);

}  // namespace qecgrad
