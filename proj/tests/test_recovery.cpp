#include <gtest/gtest.h>

#include "derived.hpp"
#include "qecgrad/error.hpp"
#include "qecgrad/objective.hpp"
#include "qecgrad/recovery.hpp"
#include "qecgrad/testkit.hpp"

using namespace qecgrad;

TEST(petz, identity_channel_gives_identity) {
  const PetzMap r = petz(identity_channel(4), identity(4) / 4.0);
  EXPECT_EQ(r.support_dimension, 4u);
  EXPECT_LT(testkit::channel_action_equal(r.channel, identity_recovery(4), 5, 1), 1e-10);
}

TEST(petz, unitary_channel_inverts) {
  testkit::SeededGenerator gen(17);
  const ComplexMatrix u = gen.unitary(4);
  const QuantumChannel ch({u});
  const PetzMap r = petz(ch, identity(4) / 4.0);
  EXPECT_LT(testkit::channel_action_equal(r.channel, QuantumChannel({u.adjoint()}), 5, 2), 1e-10);
}

TEST(petz, recovers_anchor_state) {
  testkit::SeededGenerator gen(19);
  const QuantumChannel ch = lift_iid(pauli_channel_1q(gen.pauli_params(0.2)), 2);
  const ComplexMatrix sigma = gen.density(4);
  const PetzMap r = petz(ch, sigma);
  EXPECT_LT((qecgrad::apply(r.channel, qecgrad::apply(ch, sigma)) - sigma).norm(), 1e-8);
}

TEST(petz, trace_preserving_on_support) {
  const Code five = standard_code(StandardCode::FiveQubit);
  const QuantumChannel noise = testkit::single_error_channel(5, 0.01);
  const PetzMap r = petz(noise, code_state(five));
  const ComplexMatrix n_sigma = qecgrad::apply(noise, code_state(five));
  const ComplexMatrix support = psd_pinv_sqrt(n_sigma) * n_sigma * psd_pinv_sqrt(n_sigma);
  EXPECT_EQ(r.support_dimension, 32u);
  EXPECT_LT((support * r.channel.completeness() * support - support).norm(), 1e-8);
}

TEST(petz, rank_deficient_support) {
  const Code zzz = standard_code(StandardCode::Zzz);
  const PetzMap r = petz(identity_channel(8), code_state(zzz));
  EXPECT_EQ(r.support_dimension, 2u);
  EXPECT_GT(r.channel.completeness_error(), 0.5);
}

TEST(petz, rejects_bad_sigma) {
  EXPECT_THROW(petz(identity_channel(2), identity(2)), InvalidArgument);
  EXPECT_THROW(petz(identity_channel(2), identity(4) / 4.0), DimensionError);
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 1.5;
  m(1, 1) = -0.5;
  EXPECT_THROW(petz(identity_channel(2), m), NumericalError);
}

TEST(petz, five_qubit_fidelity_matches_reference) {
  const auto& ref = test::derived("five_qubit_iid_pauli_fidelity");
  const Code five = standard_code(StandardCode::FiveQubit);
  for (double p : {0.01, 0.05}) {
    const QuantumChannel noise = lift_iid(pauli_channel_1q(PauliParams::isotropic(p)), 5);
    const QuantumChannel rec = petz(noise, code_state(five)).channel;
    char key[32];
    std::snprintf(key, sizeof key, "p=%g", p);
    const auto& block = ref.at(key).at("petz").at("normalized");
    EXPECT_NEAR(fidelity(five, noise, rec, FidelitySpec::entanglement()),
                block.at("entanglement").get<double>(), 1e-12);
    EXPECT_NEAR(fidelity(five, noise, rec, FidelitySpec::per(0)),
                block.at("codeword")[0].get<double>(), 1e-12);
  }
}

TEST(identity_recovery, leaves_states_unchanged) {
  testkit::SeededGenerator gen(23);
  const ComplexMatrix rho = gen.density(2);
  EXPECT_EQ(qecgrad::apply(identity_recovery(2), rho), rho);
  const QuantumChannel ch = pauli_channel_1q({0.1, 0.2, 0.3});
  EXPECT_LT(testkit::channel_action_equal(compose(identity_recovery(2), ch), ch, 5, 3), 1e-12);
  EXPECT_THROW(identity_recovery(0), InvalidArgument);
}

TEST(recovery_spec, custom_anchor_validation) {
  RecoverySpec s;
  s.anchor = RecoverySpec::Anchor::Custom;
  EXPECT_THROW(s.validate(), InvalidArgument);
  s.custom_sigma = identity(8) / 8.0;
  EXPECT_NO_THROW(s.validate());
  const QuantumChannel noise = lift_iid(pauli_channel_1q({0.1, 0, 0}), 3);
  const QuantumChannel rec = build_recovery(s, standard_code(StandardCode::Zzz), noise);
  EXPECT_EQ(rec.dimension(), 8u);
  s.custom_sigma = identity(8);
  EXPECT_THROW(s.validate(), InvalidArgument);
}

TEST(recovery_spec, json_round_trip) {
  RecoverySpec s;
  s.kind = RecoverySpec::Kind::Identity;
  s.refresh = RecoverySpec::Refresh::PerStep;
  const RecoverySpec back = recovery_spec_from_json(recovery_spec_to_json(s));
  EXPECT_EQ(back.kind, RecoverySpec::Kind::Identity);
  EXPECT_EQ(back.refresh, RecoverySpec::Refresh::PerStep);
  EXPECT_THROW(recovery_spec_from_json({{"kind", "decoder"}}), FormatError);
}
