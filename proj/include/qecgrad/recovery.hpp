#pragma once

// Recovery channels: the Petz map and the trivial identity recovery.

#include <cstddef>
#include <optional>
#include <string_view>

#include <nlohmann/json.hpp>

#include "qecgrad/channels.hpp"
#include "qecgrad/code.hpp"

namespace qecgrad {

struct RecoverySpec {
  enum class Kind { Petz, Identity };
  enum class Anchor { CodeProjector, Custom };
  enum class Refresh { Frozen, PerStep };

  Kind kind = Kind::Petz;
  Anchor anchor = Anchor::CodeProjector;
  std::optional<ComplexMatrix> custom_sigma;
  Refresh refresh = Refresh::Frozen;

  /// Throws InvalidArgument when custom_sigma and anchor disagree, or when
  /// custom_sigma is not a unit-trace PSD matrix.
  void validate() const;
};

struct PetzMap {
  QuantumChannel channel;
  /// Rank of N(sigma); the map is trace preserving on that support only.
  std::size_t support_dimension;
};

/// Kraus operators R_k = sigma^{1/2} K_k^dagger N(sigma)^{-1/2}, one per K_k.
PetzMap petz(const QuantumChannel& noise, const ComplexMatrix& sigma,
             std::optional<double> cutoff = std::nullopt);

QuantumChannel identity_recovery(std::size_t dim);

/// (1/K) sum_k |k^><k^| over the normalized codewords. Equals Pi/K for an
/// orthonormal code and stays a valid state while penalties keep the code
/// only approximately orthonormal.
ComplexMatrix code_state(const Code& code);

/// The recovery described by `spec` for `code` under `noise`.
QuantumChannel build_recovery(const RecoverySpec& spec, const Code& code,
                              const QuantumChannel& noise);

nlohmann::json recovery_spec_to_json(const RecoverySpec& spec);
RecoverySpec recovery_spec_from_json(const nlohmann::json& j);

std::string_view to_string(RecoverySpec::Kind kind);
std::string_view to_string(RecoverySpec::Refresh refresh);

}  // namespace qecgrad
