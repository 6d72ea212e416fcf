#include "qecgrad/optimizer.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "qecgrad/error.hpp"

namespace qecgrad {

namespace {

LossParams reported_params(const OptimizerConfig& cfg) {
  return cfg.mode == OptimizerConfig::Mode::Plain ? LossParams{} : cfg.loss;
}

// Everything one step needs that depends on the recovery in force.
struct Stage {
  FidelityEvaluator evaluator;

  double fidelity(const Code& c, const FidelitySpec& spec) const {
    return evaluator.fidelity(c, spec);
  }
};

Stage make_stage(const Code& anchor, const QuantumChannel& noise, const OptimizerConfig& cfg) {
  return Stage{FidelityEvaluator(noise, build_recovery(cfg.recovery, anchor, noise))};
}

GradientRecord step_gradient(const Stage& stage, const Code& code, const OptimizerConfig& cfg) {
  if (cfg.mode == OptimizerConfig::Mode::Plain) {
    return fd_gradient([&](const Code& c) { return 1.0 - stage.fidelity(c, cfg.fidelity); }, code,
                       cfg.fd, cfg.threads);
  }
  if (cfg.analytic_penalty) {
    const GradientRecord fid = fd_gradient(
        [&](const Code& c) {
          const double f = stage.fidelity(c, cfg.fidelity);
          return (1.0 - f) * (1.0 - f);
        },
        code, cfg.fd, cfg.threads);
    return add(fid, penalty_gradient(code, cfg.loss, PenaltyGradientMode::Exact));
  }
  return fd_gradient(
      [&](const Code& c) {
        return loss_from_fidelity(stage.fidelity(c, cfg.fidelity), c, cfg.loss).total;
      },
      code, cfg.fd, cfg.threads);
}

StepRecord record_step(std::size_t step, const Stage& stage, const Code& code,
                       const OptimizerConfig& cfg) {
  StepRecord r;
  r.step = step;
  r.fidelity = stage.fidelity(code, cfg.fidelity);
  r.loss = loss_from_fidelity(r.fidelity, code, reported_params(cfg));
  if (!std::isfinite(r.loss.total)) {
    throw NumericalError("non-finite loss at step " + std::to_string(step));
  }
  r.max_ortho = max_ortho_residual(code);
  r.max_norm_dev = max_norm_deviation(code);
  return r;
}

Trajectory run(const Code& start, const QuantumChannel& noise, const OptimizerConfig& cfg) {
  cfg.validate();
  Trajectory t{{}, {}, start, start, optimizer_config_to_json(cfg), std::nullopt};
  std::mt19937_64 rng(cfg.seed.value_or(0));
  std::normal_distribution<double> gauss(0.0, 1.0);

  Code code = start;
  try {
    std::optional<Stage> stage;
    for (std::size_t step = 0; step <= cfg.steps; ++step) {
      if (!stage || cfg.recovery.refresh == RecoverySpec::Refresh::PerStep) {
        stage.emplace(make_stage(code, noise, cfg));
      }
      StepRecord rec = record_step(step, *stage, code, cfg);
      const GradientRecord grad = step_gradient(*stage, code, cfg);
      rec.grad_norm = grad.norm;
      t.steps.push_back(rec);
      t.snapshots.push_back(code);
      t.final_code = code;
      if (step == cfg.steps) break;

      ComplexMatrix direction = grad.as_matrix();
      if (cfg.gradient_noise > 0.0) {
        for (Eigen::Index j = 0; j < direction.cols(); ++j) {
          for (Eigen::Index i = 0; i < direction.rows(); ++i) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            direction(i, j) += cfg.gradient_noise * Complex(re, im);
          }
        }
      }
      Code next(ComplexMatrix(code.amplitudes() - cfg.learning_rate * direction), code.label());
      code = cfg.projects() ? gram_schmidt(next) : next;
    }
  } catch (const Error& e) {
    t.error = e.what();
  }
  return t;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (!(std::isfinite(learning_rate) && learning_rate >= 0.0)) {
    throw InvalidArgument("learning rate must be finite and non-negative");
  }
  if (!(std::isfinite(gradient_noise) && gradient_noise >= 0.0)) {
    throw InvalidArgument("gradient_noise must be finite and non-negative");
  }
  fd.validate();
  loss.validate();
  recovery.validate();
}

std::string_view to_string(OptimizerConfig::Mode mode) {
  return mode == OptimizerConfig::Mode::Plain ? "plain" : "stabilized";
}

Trajectory plain_gd(const Code& code, const QuantumChannel& noise, const OptimizerConfig& cfg) {
  if (cfg.mode != OptimizerConfig::Mode::Plain) throw InvalidArgument("plain_gd needs mode plain");
  return run(code, noise, cfg);
}

Trajectory stabilized_gd(const Code& code, const QuantumChannel& noise,
                         const OptimizerConfig& cfg) {
  if (cfg.mode != OptimizerConfig::Mode::Stabilized) {
    throw InvalidArgument("stabilized_gd needs mode stabilized");
  }
  return run(code, noise, cfg);
}

Trajectory optimize(const Code& code, const QuantumChannel& noise, const OptimizerConfig& cfg) {
  return cfg.mode == OptimizerConfig::Mode::Plain ? plain_gd(code, noise, cfg)
                                                  : stabilized_gd(code, noise, cfg);
}

LossBreakdown evaluate_code(const Code& code, const QuantumChannel& noise,
                            const OptimizerConfig& cfg, const std::optional<Code>& anchor) {
  const Stage stage = make_stage(anchor.value_or(code), noise, cfg);
  return loss_from_fidelity(stage.fidelity(code, cfg.fidelity), code, reported_params(cfg));
}

nlohmann::json optimizer_config_to_json(const OptimizerConfig& cfg) {
  nlohmann::json j;
  j["mode"] = to_string(cfg.mode);
  j["learning_rate"] = cfg.learning_rate;
  j["steps"] = cfg.steps;
  j["delta"] = cfg.fd.delta;
  j["scheme"] = to_string(cfg.fd.scheme);
  j["alpha"] = cfg.loss.alpha;
  j["beta"] = cfg.loss.beta;
  j["fidelity"] = to_string(cfg.fidelity);
  j["raw_fidelity"] = cfg.fidelity.raw;
  j["recovery"] = recovery_spec_to_json(cfg.recovery);
  j["seed"] = cfg.seed ? nlohmann::json(*cfg.seed) : nlohmann::json(nullptr);
  j["gradient_noise"] = cfg.gradient_noise;
  j["analytic_penalty"] = cfg.analytic_penalty;
  j["project"] = cfg.projects();
  return j;
}

nlohmann::json trajectory_to_json(const Trajectory& t) {
  nlohmann::json steps = nlohmann::json::array();
  for (const StepRecord& s : t.steps) {
    steps.push_back({{"step", s.step},
                     {"fidelity", s.fidelity},
                     {"loss", s.loss.total},
                     {"fidelity_term", s.loss.fidelity_term},
                     {"ortho_term", s.loss.ortho_term},
                     {"norm_term", s.loss.norm_term},
                     {"grad_norm", s.grad_norm},
                     {"max_ortho", s.max_ortho},
                     {"max_norm_dev", s.max_norm_dev}});
  }
  nlohmann::json j;
  j["config"] = t.config;
  j["steps"] = steps;
  j["final_code"] = code_to_json(t.final_code);
  if (t.error) j["error"] = *t.error;
  return j;
}

std::string trajectory_to_csv(const Trajectory& t) {
  std::string out =
      "step,fidelity,loss,fidelity_term,ortho_term,norm_term,grad_norm,max_ortho,max_norm_dev\n";
  char line[512];
  for (const StepRecord& s : t.steps) {
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  s.step, s.fidelity, s.loss.total, s.loss.fidelity_term, s.loss.ortho_term,
                  s.loss.norm_term, s.grad_norm, s.max_ortho, s.max_norm_dev);
    out += line;
  }
  return out;
}

}  // namespace qecgrad
