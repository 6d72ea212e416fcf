#include <algorithm>

#include <gtest/gtest.h>

#include "qecgrad/error.hpp"
#include "qecgrad/optimizer.hpp"
#include "qecgrad/testkit.hpp"

using namespace qecgrad;

namespace {

OptimizerConfig small(OptimizerConfig::Mode mode, std::size_t steps, double lr) {
  OptimizerConfig cfg;
  cfg.mode = mode;
  cfg.steps = steps;
  cfg.learning_rate = lr;
  cfg.loss = {2.0, 2.0};
  return cfg;
}

}  // namespace

TEST(optimizer, zero_steps_records_baseline) {
  const Code zzz = standard_code(StandardCode::Zzz);
  const QuantumChannel noise = lift_iid(pauli_channel_1q(PauliParams::isotropic(0.05)), 3);
  const Trajectory t = optimize(zzz, noise, small(OptimizerConfig::Mode::Plain, 0, 0.01));
  ASSERT_TRUE(t.ok());
  ASSERT_EQ(t.steps.size(), 1u);
  EXPECT_EQ(t.steps[0].fidelity, evaluate_code(zzz, noise, small(OptimizerConfig::Mode::Plain, 0, 0.01)).fidelity);
  EXPECT_EQ(t.final_code.amplitudes(), zzz.amplitudes());
}

TEST(optimizer, zero_learning_rate_is_a_fixed_point) {
  testkit::SeededGenerator gen(59);
  const Code code = gram_schmidt(gen.code(2, 2));
  const QuantumChannel noise = lift_iid(pauli_channel_1q(gen.pauli_params(0.1)), 2);
  for (auto mode : {OptimizerConfig::Mode::Plain, OptimizerConfig::Mode::Stabilized}) {
    OptimizerConfig cfg = small(mode, 3, 0.0);
    cfg.project = false;
    const Trajectory t = optimize(code, noise, cfg);
    ASSERT_TRUE(t.ok());
    EXPECT_EQ(t.final_code.amplitudes(), code.amplitudes());
    for (const StepRecord& s : t.steps) EXPECT_EQ(s.fidelity, t.steps[0].fidelity);
  }
}

TEST(optimizer, noiseless_code_does_not_move) {
  const Code five = standard_code(StandardCode::FiveQubit);
  OptimizerConfig cfg = small(OptimizerConfig::Mode::Plain, 2, 0.01);
  cfg.fd.delta = 1e-6;
  const Trajectory t = plain_gd(five, identity_channel(32), cfg);
  ASSERT_TRUE(t.ok());
  for (const StepRecord& s : t.steps) EXPECT_NEAR(s.fidelity, 1.0, 1e-10);
  EXPECT_LT((t.final_code.amplitudes() - five.amplitudes()).norm(), 1e-6);
}

TEST(optimizer, plain_snapshots_are_orthonormal) {
  testkit::SeededGenerator gen(61);
  const Code code = gen.code(2, 2);
  const QuantumChannel noise = lift_iid(pauli_channel_1q(gen.pauli_params(0.1)), 2);
  const Trajectory t = plain_gd(code, noise, small(OptimizerConfig::Mode::Plain, 4, 0.05));
  ASSERT_TRUE(t.ok());
  ASSERT_EQ(t.snapshots.size(), 5u);
  for (std::size_t s = 1; s < t.snapshots.size(); ++s) {
    EXPECT_LT(max_ortho_residual(t.snapshots[s]), 1e-12);
    EXPECT_LT(max_norm_deviation(t.snapshots[s]), 1e-12);
  }
}

TEST(optimizer, plain_descent_improves_a_poor_code) {
  testkit::SeededGenerator gen(67);
  const Code code = gram_schmidt(gen.code(2, 2));
  const QuantumChannel noise = lift_iid(pauli_channel_1q({0.1, 0.0, 0.0}), 2);
  OptimizerConfig cfg = small(OptimizerConfig::Mode::Plain, 10, 0.05);
  cfg.recovery.kind = RecoverySpec::Kind::Identity;
  const Trajectory t = plain_gd(code, noise, cfg);
  ASSERT_TRUE(t.ok());
  EXPECT_GT(t.steps.back().fidelity, t.steps.front().fidelity);
}

TEST(optimizer, final_record_matches_reevaluation) {
  testkit::SeededGenerator gen(71);
  const Code code = gen.code(2, 2);
  const QuantumChannel noise = lift_iid(pauli_channel_1q(gen.pauli_params(0.1)), 2);
  for (auto mode : {OptimizerConfig::Mode::Plain, OptimizerConfig::Mode::Stabilized}) {
    OptimizerConfig cfg = small(mode, 3, 0.01);
    cfg.recovery.refresh = RecoverySpec::Refresh::PerStep;
    const Trajectory t = optimize(code, noise, cfg);
    ASSERT_TRUE(t.ok());
    const LossBreakdown b = evaluate_code(t.final_code, noise, cfg);
    EXPECT_NEAR(b.fidelity, t.steps.back().fidelity, 1e-12);
    EXPECT_NEAR(b.total, t.steps.back().loss.total, 1e-12);
  }
}

TEST(optimizer, stabilized_records_penalty_terms) {
  ComplexMatrix a = standard_code(StandardCode::Zzz).amplitudes();
  a(1, 0) = 0.2;
  a(1, 1) = 0.1;
  const Code code(a);
  const QuantumChannel noise = lift_iid(pauli_channel_1q(PauliParams::isotropic(0.02)), 3);
  const Trajectory t = stabilized_gd(code, noise, small(OptimizerConfig::Mode::Stabilized, 5, 0.02));
  ASSERT_TRUE(t.ok());
  EXPECT_GT(t.steps[0].loss.ortho_term, 0.0);
  EXPECT_GT(t.steps[0].loss.norm_term, 0.0);
  EXPECT_LT(t.steps.back().loss.total, t.steps.front().loss.total);
  EXPECT_NEAR(t.steps[0].max_ortho, max_ortho_residual(code), 1e-15);
}

TEST(optimizer, analytic_and_numeric_penalty_agree) {
  testkit::SeededGenerator gen(73);
  const Code code = gen.code(2, 2, -0.8, 0.8);
  const QuantumChannel noise = lift_iid(pauli_channel_1q(gen.pauli_params(0.05)), 2);
  OptimizerConfig cfg = small(OptimizerConfig::Mode::Stabilized, 2, 0.01);
  cfg.fd.delta = 1e-7;
  const Trajectory a = optimize(code, noise, cfg);
  cfg.analytic_penalty = false;
  const Trajectory b = optimize(code, noise, cfg);
  EXPECT_LT((a.final_code.amplitudes() - b.final_code.amplitudes()).norm(), 1e-5);
}

TEST(optimizer, seeded_gradient_noise_is_reproducible) {
  testkit::SeededGenerator gen(79);
  const Code code = gen.code(2, 2);
  const QuantumChannel noise = lift_iid(pauli_channel_1q(gen.pauli_params(0.05)), 2);
  OptimizerConfig cfg = small(OptimizerConfig::Mode::Stabilized, 2, 0.01);
  cfg.seed = 5;
  cfg.gradient_noise = 0.1;
  const Trajectory a = optimize(code, noise, cfg);
  const Trajectory b = optimize(code, noise, cfg);
  EXPECT_EQ(trajectory_to_json(a).dump(), trajectory_to_json(b).dump());
  cfg.gradient_noise = 0.0;
  EXPECT_NE(optimize(code, noise, cfg).final_code.amplitudes(), a.final_code.amplitudes());
}

TEST(optimizer, threads_do_not_change_results) {
  testkit::SeededGenerator gen(83);
  const Code code = gen.code(3, 2);
  const QuantumChannel noise = lift_iid(pauli_channel_1q(gen.pauli_params(0.05)), 3);
  OptimizerConfig cfg = small(OptimizerConfig::Mode::Stabilized, 2, 0.01);
  const std::string one = trajectory_to_json(optimize(code, noise, cfg)).dump();
  cfg.threads = 3;
  EXPECT_EQ(trajectory_to_json(optimize(code, noise, cfg)).dump(), one);
}

TEST(optimizer, failures_are_recorded_not_thrown) {
  const Code doubled(ComplexMatrix(2.0 * standard_code(StandardCode::Zzz).amplitudes()));
  const QuantumChannel noise = lift_iid(pauli_channel_1q(PauliParams::isotropic(0.05)), 3);
  const Trajectory t = optimize(doubled, noise, small(OptimizerConfig::Mode::Stabilized, 3, 1e308));
  EXPECT_FALSE(t.ok());
  EXPECT_EQ(t.steps.size(), 1u);
  EXPECT_TRUE(trajectory_to_json(t).contains("error"));
  const Trajectory wrong = optimize(doubled, identity_channel(4), small(OptimizerConfig::Mode::Plain, 1, 0.1));
  EXPECT_FALSE(wrong.ok());
}

TEST(optimizer, config_errors) {
  const Code zzz = standard_code(StandardCode::Zzz);
  const QuantumChannel noise = identity_channel(8);
  EXPECT_THROW(optimize(zzz, noise, small(OptimizerConfig::Mode::Plain, 1, -1.0)), InvalidArgument);
  EXPECT_THROW(stabilized_gd(zzz, noise, small(OptimizerConfig::Mode::Plain, 1, 0.1)), InvalidArgument);
}

TEST(optimizer, csv_schema) {
  const Code zzz = standard_code(StandardCode::Zzz);
  const Trajectory t = optimize(zzz, identity_channel(8), small(OptimizerConfig::Mode::Plain, 2, 0.1));
  const std::string csv = trajectory_to_csv(t);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  EXPECT_EQ(csv.rfind("step,fidelity,loss", 0), 0u);
}
