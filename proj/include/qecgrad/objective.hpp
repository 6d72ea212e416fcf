#pragma once

// Fidelities of a code under noise followed by recovery, and the penalty loss
//   (1 - F)^2 + alpha sum_{i<j} |<i|j>|^2 + beta sum_i (1 - ||i||)^2.

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qecgrad/channels.hpp"
#include "qecgrad/code.hpp"

namespace qecgrad {

struct FidelitySpec {
  enum class Kind { AvgCodeword, PerCodeword, Entanglement };

  Kind kind = Kind::AvgCodeword;
  std::size_t index = 0;  // PerCodeword only
  /// Evaluate on the codewords as given instead of their normalized copies.
  bool raw = false;

  static FidelitySpec avg() { return {}; }
  static FidelitySpec per(std::size_t k) { return {Kind::PerCodeword, k, false}; }
  static FidelitySpec entanglement() { return {Kind::Entanglement, 0, false}; }
};

/// "avg", "per:<k>" or "entanglement".
FidelitySpec parse_fidelity_kind(std::string_view text);
std::string to_string(const FidelitySpec& spec);

/// Precomputed stacks of the noise and recovery Kraus operators, so one
/// fidelity costs a few dense products instead of a Kraus-by-Kraus sum.
///
/// With v_b = N_b|i>, w_a = R_a^dagger |i>:
///   F_i = sum_a w_a^dagger (sum_b v_b v_b^dagger) w_a
/// and the entanglement fidelity stacks the same vectors over codewords.
class FidelityEvaluator {
 public:
  FidelityEvaluator(const QuantumChannel& noise, const QuantumChannel& recovery);

  std::size_t dimension() const noexcept { return dim_; }

  /// F_i for every codeword, normalized first unless `raw`.
  std::vector<double> codeword_fidelities(const Code& code, bool raw = false) const;
  double entanglement_fidelity(const Code& code, bool raw = false) const;
  double fidelity(const Code& code, const FidelitySpec& spec) const;

 private:
  ComplexMatrix prepared(const Code& code, bool raw) const;
  // Column b of the result is N_b psi, returned as a d x m block per codeword.
  ComplexMatrix noise_images(const ComplexMatrix& psi) const;
  ComplexMatrix recovery_images(const ComplexMatrix& psi) const;

  std::size_t dim_;
  std::size_t noise_count_;
  std::size_t recovery_count_;
  ComplexMatrix noise_stack_;     // (m d) x d, rows b*d.. hold N_b
  ComplexMatrix recovery_stack_;  // (r d) x d, rows a*d.. hold R_a^dagger
};

double fidelity(const Code& code, const QuantumChannel& noise, const QuantumChannel& recovery,
                const FidelitySpec& spec);

struct LossParams {
  double alpha = 0.0;
  double beta = 0.0;

  void validate() const;
};

struct LossBreakdown {
  double total = 0.0;
  double fidelity = 0.0;
  double fidelity_term = 0.0;
  double ortho_term = 0.0;
  double norm_term = 0.0;
};

/// alpha * sum_{i<j} |<i|j>|^2
double ortho_penalty(const Code& code, double alpha);
/// beta * sum_i (1 - ||i||)^2
double norm_penalty(const Code& code, double beta);
double penalty(const Code& code, const LossParams& params);

/// Breakdown for an already computed fidelity.
LossBreakdown loss_from_fidelity(double fidelity, const Code& code, const LossParams& params);

LossBreakdown loss(const Code& code, const QuantumChannel& noise, const QuantumChannel& recovery,
                   const FidelitySpec& spec, const LossParams& params);

/// (f, g) with f = sum(x u + y v), g = sum(y u - x v) for i = x + iy and
/// j = u + iv. Note f + ig = sum conj(j) i, i.e. the physics <j|i>; the
/// squared magnitude used in the loss does not depend on the order.
std::pair<double, double> inner_product_parts(const Codeword& i, const Codeword& j);

}  // namespace qecgrad
