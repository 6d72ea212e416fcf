#pragma once

// Quantum channels in Kraus form.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qecgrad/linalg.hpp"

namespace qecgrad {

inline constexpr double kKrausPruneThreshold = 1e-14;
inline constexpr double kCompletenessTolerance = 1e-10;

class QuantumChannel {
 public:
  /// Operators must be square, equally sized, and finite. Trace preservation is
  /// not required here (a Petz map is only complete on a support); see
  /// completeness_error().
  explicit QuantumChannel(std::vector<ComplexMatrix> kraus, std::string label = {});

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return kraus_.size(); }
  const std::vector<ComplexMatrix>& kraus() const noexcept { return kraus_; }
  const ComplexMatrix& operator[](std::size_t k) const { return kraus_[k]; }
  const std::string& label() const noexcept { return label_; }

  /// sum_k K_k^dagger K_k
  ComplexMatrix completeness() const;
  /// max entry of |sum_k K_k^dagger K_k - I|
  double completeness_error() const;
  bool is_trace_preserving(double tolerance = kCompletenessTolerance) const {
    return completeness_error() <= tolerance;
  }

 private:
  std::vector<ComplexMatrix> kraus_;
  std::string label_;
  std::size_t dimension_ = 0;
};

struct PauliParams {
  double px = 0.0;
  double py = 0.0;
  double pz = 0.0;

  static PauliParams isotropic(double p) { return {p, p, p}; }
};

QuantumChannel identity_channel(std::size_t dim);

/// sqrt(1-px-py-pz) I, sqrt(px) X, sqrt(py) Y, sqrt(pz) Z, zero operators pruned.
QuantumChannel pauli_channel_1q(const PauliParams& p);

/// K0 = diag(1, sqrt(1-gamma)), K1 = sqrt(gamma) |0><1|.
QuantumChannel amplitude_damping_1q(double gamma);

/// The same single-qubit channel on each of n qubits: all m^n tensor products
/// of the per-qubit operators, operators below the prune threshold dropped.
QuantumChannel lift_iid(const QuantumChannel& single, std::size_t n);

/// sum_k K rho K^dagger, summed in Kraus order.
ComplexMatrix apply(const QuantumChannel& channel, const ComplexMatrix& rho);

/// Kraus set {A_i B_j}: `before` acts first.
QuantumChannel compose(const QuantumChannel& after, const QuantumChannel& before);

/// Drops operators whose Frobenius norm is below `threshold`.
std::vector<ComplexMatrix> prune_kraus(std::vector<ComplexMatrix> kraus,
                                       double threshold = kKrausPruneThreshold);

/// Run-config channel description:
/// {"kind": "pauli"|"damping", "px", "py", "pz", "gamma", "qubits"}.
struct ChannelSpec {
  enum class Kind { Pauli, Damping };

  Kind kind = Kind::Pauli;
  PauliParams pauli{};
  double gamma = 0.0;
  std::size_t qubits = 1;

  static ChannelSpec isotropic_pauli(double p, std::size_t qubits) {
    return {Kind::Pauli, PauliParams::isotropic(p), 0.0, qubits};
  }
};

QuantumChannel build_channel(const ChannelSpec& spec);
nlohmann::json channel_spec_to_json(const ChannelSpec& spec);
ChannelSpec channel_spec_from_json(const nlohmann::json& j);

}  // namespace qecgrad
