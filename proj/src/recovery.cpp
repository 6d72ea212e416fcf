#include "qecgrad/recovery.hpp"

#include <cmath>
#include <string>

#include "qecgrad/error.hpp"

namespace qecgrad {

namespace {

constexpr double kSigmaTraceTolerance = 1e-10;

void check_state(const ComplexMatrix& sigma) {
  if (sigma.rows() != sigma.cols()) throw DimensionError("sigma must be square");
  if (!all_finite(sigma)) throw NumericalError("sigma has non-finite entries");
  const double tr_err = std::abs(sigma.trace() - Complex(1.0, 0.0));
  if (tr_err > kSigmaTraceTolerance) {
    throw InvalidArgument("sigma must have unit trace (off by " + std::to_string(tr_err) + ")");
  }
}

}  // namespace

void RecoverySpec::validate() const {
  if ((anchor == Anchor::Custom) != custom_sigma.has_value()) {
    throw InvalidArgument("custom_sigma must be given exactly when anchor is custom");
  }
  if (custom_sigma) {
    check_state(*custom_sigma);
    psd_sqrt(*custom_sigma);  // throws on a negative spectrum
  }
}

PetzMap petz(const QuantumChannel& noise, const ComplexMatrix& sigma,
             std::optional<double> cutoff) {
  check_state(sigma);
  if (static_cast<std::size_t>(sigma.rows()) != noise.dimension()) {
    throw DimensionError("petz: sigma dimension does not match the channel");
  }
  const ComplexMatrix sigma_half = psd_sqrt(sigma, cutoff);
  const ComplexMatrix n_sigma = qecgrad::apply(noise, sigma);
  const ComplexMatrix n_pinv_half = psd_pinv_sqrt(n_sigma, cutoff);
  const std::size_t support = psd_rank(n_sigma, cutoff);

  std::vector<ComplexMatrix> ops;
  ops.reserve(noise.size());
  for (const ComplexMatrix& k : noise.kraus()) {
    ops.push_back(sigma_half * k.adjoint() * n_pinv_half);
  }
  ops = prune_kraus(std::move(ops));
  if (ops.empty()) {
    const auto n = static_cast<Eigen::Index>(noise.dimension());
    ops.push_back(ComplexMatrix::Zero(n, n));
  }
  return PetzMap{QuantumChannel(std::move(ops), "petz(" + noise.label() + ")"), support};
}

QuantumChannel identity_recovery(std::size_t dim) {
  if (dim < 1) throw InvalidArgument("identity_recovery needs dim >= 1");
  return QuantumChannel({identity(dim)}, "identity");
}

ComplexMatrix code_state(const Code& code) {
  const Code unit = code.normalized();
  const ComplexMatrix& a = unit.amplitudes();
  return (a * a.adjoint()) / static_cast<double>(unit.size());
}

QuantumChannel build_recovery(const RecoverySpec& spec, const Code& code,
                              const QuantumChannel& noise) {
  spec.validate();
  if (code.dimension() != noise.dimension()) {
    throw DimensionError("recovery: code dimension " + std::to_string(code.dimension()) +
                         " does not match channel dimension " +
                         std::to_string(noise.dimension()));
  }
  if (spec.kind == RecoverySpec::Kind::Identity) return identity_recovery(code.dimension());
  const ComplexMatrix sigma =
      spec.anchor == RecoverySpec::Anchor::Custom ? *spec.custom_sigma : code_state(code);
  return petz(noise, sigma).channel;
}

std::string_view to_string(RecoverySpec::Kind kind) {
  return kind == RecoverySpec::Kind::Petz ? "petz" : "identity";
}

std::string_view to_string(RecoverySpec::Refresh refresh) {
  return refresh == RecoverySpec::Refresh::Frozen ? "frozen" : "per_step";
}

nlohmann::json recovery_spec_to_json(const RecoverySpec& spec) {
  nlohmann::json j;
  j["kind"] = to_string(spec.kind);
  j["anchor"] = spec.anchor == RecoverySpec::Anchor::Custom ? "custom" : "code_projector";
  j["refresh"] = to_string(spec.refresh);
  return j;
}

RecoverySpec recovery_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("recovery spec must be an object");
  RecoverySpec spec;
  const std::string kind = j.value("kind", std::string("petz"));
  if (kind == "petz") {
    spec.kind = RecoverySpec::Kind::Petz;
  } else if (kind == "identity") {
    spec.kind = RecoverySpec::Kind::Identity;
  } else {
    throw FormatError("unknown recovery kind '" + kind + "'");
  }
  const std::string anchor = j.value("anchor", std::string("code_projector"));
  if (anchor != "code_projector") {
    throw FormatError("recovery anchor '" + anchor + "' is not supported in config files");
  }
  const std::string refresh = j.value("refresh", std::string("frozen"));
  if (refresh == "frozen") {
    spec.refresh = RecoverySpec::Refresh::Frozen;
  } else if (refresh == "per_step") {
    spec.refresh = RecoverySpec::Refresh::PerStep;
  } else {
    throw FormatError("unknown recovery refresh '" + refresh + "'");
  }
  return spec;
}

}  // namespace qecgrad
