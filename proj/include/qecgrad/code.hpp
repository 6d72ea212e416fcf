#pragma once

// Codewords and codes. A code stores its K codewords as the columns of a
// d x K amplitude matrix; nothing here assumes the columns are normalized.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qecgrad/linalg.hpp"

namespace qecgrad {

class Codeword {
 public:
  /// Throws DimensionError unless the length is 2^n with n >= 1, and
  /// NumericalError on non-finite amplitudes.
  explicit Codeword(ComplexVector amplitudes);

  const ComplexVector& amplitudes() const noexcept { return amplitudes_; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }
  std::size_t qubits() const noexcept { return qubits_; }
  double norm() const { return amplitudes_.norm(); }

 private:
  ComplexVector amplitudes_;
  std::size_t qubits_;
};

class Code {
 public:
  Code(std::vector<Codeword> codewords, std::string label = {});
  /// Columns of `amplitudes` are the codewords.
  explicit Code(ComplexMatrix amplitudes, std::string label = {});

  std::size_t size() const noexcept { return static_cast<std::size_t>(amplitudes_.cols()); }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(amplitudes_.rows()); }
  std::size_t qubits() const noexcept { return qubits_; }
  /// Total number of complex coefficients, K * 2^n.
  std::size_t coefficient_count() const noexcept { return size() * dimension(); }

  const std::string& label() const noexcept { return label_; }
  const ComplexMatrix& amplitudes() const noexcept { return amplitudes_; }
  Codeword codeword(std::size_t k) const;
  auto column(std::size_t k) const { return amplitudes_.col(static_cast<Eigen::Index>(k)); }
  Complex coefficient(std::size_t word, std::size_t index) const {
    return amplitudes_(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(word));
  }

  /// Copy with amplitude (word, index) shifted by `offset`.
  Code shifted(std::size_t word, std::size_t index, Complex offset) const;
  Code relabeled(std::string label) const;

  /// Each codeword scaled to unit 2-norm; throws NumericalError on a zero codeword.
  Code normalized() const;

  friend bool operator==(const Code& a, const Code& b) {
    return a.label_ == b.label_ && a.amplitudes_ == b.amplitudes_;
  }

 private:
  void validate();

  ComplexMatrix amplitudes_;
  std::string label_;
  std::size_t qubits_ = 0;
};

enum class StandardCode { Xxx, Zzz, FiveQubit };

StandardCode parse_standard_code(std::string_view name);
std::string_view to_string(StandardCode code);

/// ZZZ = {|000>, |111>}, XXX = {|+++>, |--->}, FIVE_QUBIT = the [[5,1,3]]
/// logical pair from the XZZXI stabilizer group.
Code standard_code(StandardCode name);

/// The four XZZXI-type generators of the five-qubit code, as Pauli strings.
std::vector<std::string> five_qubit_stabilizers();

struct PerturbationSpec {
  double magnitude = 0.05;
  bool renormalize = true;
};

/// Shifts coefficient c (word-major order) by magnitude * pattern[c]. An empty
/// pattern adds +magnitude to the real part of every coefficient.
Code perturb(const Code& code, const PerturbationSpec& spec,
             std::span<const Complex> pattern = {});

/// Classical Gram-Schmidt in list order. Throws NumericalError when a
/// residual norm drops below 1e-10.
Code gram_schmidt(const Code& code);

/// Sum of |i><i|. Throws NumericalError unless the codewords are
/// orthonormal within 1e-8.
ComplexMatrix code_projector(const Code& code);

/// Complex Gram matrix G(i, j) = <i|j> (physics convention).
ComplexMatrix gram_matrix(const Code& code);

/// max_{i<j} |<i|j>|, zero for a single codeword.
double max_ortho_residual(const Code& code);

/// max_i |1 - ||i|| |.
double max_norm_deviation(const Code& code);

/// 17-significant-digit decimal text; parses back to the same double.
std::string format_exact(double value);
double parse_exact(const nlohmann::json& value);

nlohmann::json code_to_json(const Code& code);
Code code_from_json(const nlohmann::json& j);

Code load_code(const std::filesystem::path& path);
void save_code(const Code& code, const std::filesystem::path& path);

}  // namespace qecgrad
