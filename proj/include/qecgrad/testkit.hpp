#pragma once

// Seeded generators and brute-force oracles shared by the tests and the
// fixture generator.

#include <cstddef>
#include <cstdint>
#include <functional>

#include <nlohmann/json.hpp>

#include "qecgrad/channels.hpp"
#include "qecgrad/code.hpp"
#include "qecgrad/linalg.hpp"

namespace qecgrad::testkit {

/// splitmix64 stream. Doubles use the top 53 bits; gaussian() is the
/// Irwin-Hall sum of 12 uniforms minus 6, so every value is fixed by the seed
/// on any platform.
class SeededGenerator {
 public:
  explicit SeededGenerator(std::uint64_t seed) : state_(seed), seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t next_u64() noexcept;
  double uniform() noexcept;  // [0, 1)
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  double gaussian() noexcept;
  Complex complex_gaussian() noexcept { return {gaussian(), gaussian()}; }

  ComplexMatrix gaussian_matrix(std::size_t rows, std::size_t cols);
  ComplexMatrix hermitian(std::size_t dim);
  /// G G^dagger with G dim x rank.
  ComplexMatrix psd(std::size_t dim, std::size_t rank);
  /// G G^dagger / tr(G G^dagger).
  ComplexMatrix density(std::size_t dim);
  /// Q factor of a Gaussian matrix.
  ComplexMatrix unitary(std::size_t dim);
  /// Real and imaginary parts uniform in [lo, hi).
  Code code(std::size_t qubits, std::size_t words, double lo = -1.0, double hi = 1.0);
  /// Each probability uniform in [0, max_each).
  PauliParams pauli_params(double max_each);

 private:
  std::uint64_t state_;
  std::uint64_t seed_;
};

using RealFunction = std::function<double(const RealVector&)>;

/// Central-difference gradient. Throws NumericalError on non-finite values.
RealVector fd_oracle(const RealFunction& f, const RealVector& point, double delta);

/// Coefficients of a code as (x_0..x_{N-1}, y_0..y_{N-1}) in word-major order, and back.
RealVector code_to_real(const Code& code);
Code code_from_real(const RealVector& v, std::size_t words, std::size_t dim);

/// max over seeded random density matrices of ||a(rho) - b(rho)||_F.
double channel_action_equal(const QuantumChannel& a, const QuantumChannel& b, std::size_t trials,
                            std::uint64_t seed);

/// Kronecker product by explicit index arithmetic.
ComplexMatrix kron_oracle(const ComplexMatrix& a, const ComplexMatrix& b);

/// Pauli P on qubit q of n (qubit 0 most significant), I elsewhere.
ComplexMatrix pauli_on(char p, std::size_t q, std::size_t n);

/// K_0 = sqrt(1 - 3 n p) I and sqrt(p) P_q for every qubit q and P in X, Y, Z.
QuantumChannel single_error_channel(std::size_t n, double p);

/// Kraus operators mixed by a unitary, K'_i = sum_j U_ij K_j.
QuantumChannel remixed(const QuantumChannel& ch, const ComplexMatrix& u);

/// <i|R(N(|i><i|))|i> through apply(), codeword normalized unless `raw`.
double reference_codeword_fidelity(const Code& code, std::size_t k, const QuantumChannel& noise,
                                   const QuantumChannel& recovery, bool raw = false);

/// <Phi|(R N (x) I)(|Phi><Phi|)|Phi> with |Phi> = K^{-1/2} sum_k |k^>|k>.
double reference_entanglement_fidelity(const Code& code, const QuantumChannel& noise,
                                       const QuantumChannel& recovery, bool raw = false);

/// The five-qubit logical pair obtained by applying each (I + g)/2 in turn to
/// |00000> and X^5 |00000>, without the library constructor.
Code five_qubit_oracle();

/// Oracle-computed reference values keyed by name; each entry records its
/// seed and oracle.
nlohmann::json derived_values();

}  // namespace qecgrad::testkit
