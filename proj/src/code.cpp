#include "qecgrad/code.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qecgrad/error.hpp"

namespace qecgrad {

namespace {

constexpr double kRankTolerance = 1e-10;
constexpr double kProjectorOrthonormality = 1e-8;

std::size_t qubits_for_length(std::size_t length) {
  if (length < 2 || (length & (length - 1)) != 0) {
    throw DimensionError("codeword length " + std::to_string(length) +
                         " is not a power of two >= 2");
  }
  std::size_t n = 0;
  while ((std::size_t{1} << n) < length) ++n;
  return n;
}

}  // namespace

Codeword::Codeword(ComplexVector amplitudes)
    : amplitudes_(std::move(amplitudes)),
      qubits_(qubits_for_length(static_cast<std::size_t>(amplitudes_.size()))) {
  if (!all_finite(amplitudes_)) throw NumericalError("codeword has non-finite amplitudes");
}

Code::Code(std::vector<Codeword> codewords, std::string label) : label_(std::move(label)) {
  if (codewords.empty()) throw InvalidArgument("a code needs at least one codeword");
  const std::size_t dim = codewords.front().dimension();
  amplitudes_.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(codewords.size()));
  for (std::size_t k = 0; k < codewords.size(); ++k) {
    if (codewords[k].dimension() != dim) {
      throw DimensionError("codeword " + std::to_string(k) + " has length " +
                           std::to_string(codewords[k].dimension()) + ", expected " +
                           std::to_string(dim));
    }
    amplitudes_.col(static_cast<Eigen::Index>(k)) = codewords[k].amplitudes();
  }
  validate();
}

Code::Code(ComplexMatrix amplitudes, std::string label)
    : amplitudes_(std::move(amplitudes)), label_(std::move(label)) {
  validate();
}

void Code::validate() {
  if (amplitudes_.cols() < 1) throw InvalidArgument("a code needs at least one codeword");
  qubits_ = qubits_for_length(static_cast<std::size_t>(amplitudes_.rows()));
  if (!all_finite(amplitudes_)) throw NumericalError("code has non-finite amplitudes");
}

Codeword Code::codeword(std::size_t k) const {
  if (k >= size()) throw InvalidArgument("codeword index out of range");
  return Codeword(amplitudes_.col(static_cast<Eigen::Index>(k)));
}

Code Code::shifted(std::size_t word, std::size_t index, Complex offset) const {
  Code out = *this;
  out.amplitudes_(static_cast<Eigen::Index>(index), static_cast<Eigen::Index>(word)) += offset;
  return out;
}

Code Code::relabeled(std::string label) const {
  Code out = *this;
  out.label_ = std::move(label);
  return out;
}

Code Code::normalized() const {
  ComplexMatrix m = amplitudes_;
  for (Eigen::Index k = 0; k < m.cols(); ++k) {
    const double n = m.col(k).norm();
    if (n == 0.0) throw NumericalError("cannot normalize a zero codeword");
    m.col(k) /= n;
  }
  return Code(std::move(m), label_);
}

StandardCode parse_standard_code(std::string_view name) {
  if (name == "xxx" || name == "XXX") return StandardCode::Xxx;
  if (name == "zzz" || name == "ZZZ") return StandardCode::Zzz;
  if (name == "five_qubit" || name == "FIVE_QUBIT" || name == "513") return StandardCode::FiveQubit;
  throw InvalidArgument("unknown standard code '" + std::string(name) + "'");
}

std::string_view to_string(StandardCode code) {
  switch (code) {
    case StandardCode::Xxx:
      return "xxx";
    case StandardCode::Zzz:
      return "zzz";
    case StandardCode::FiveQubit:
      return "five_qubit";
  }
  return "unknown";
}

std::vector<std::string> five_qubit_stabilizers() {
  return {"XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"};
}

Code standard_code(StandardCode name) {
  switch (name) {
    case StandardCode::Zzz: {
      ComplexMatrix m = ComplexMatrix::Zero(8, 2);
      m(0, 0) = 1.0;
      m(7, 1) = 1.0;
      return Code(std::move(m), "zzz");
    }
    case StandardCode::Xxx: {
      ComplexMatrix m(8, 2);
      const double a = 1.0 / std::sqrt(8.0);
      for (Eigen::Index i = 0; i < 8; ++i) {
        // |---> picks up (-1)^{popcount(i)}
        const int parity = __builtin_popcount(static_cast<unsigned>(i)) & 1;
        m(i, 0) = a;
        m(i, 1) = parity ? -a : a;
      }
      return Code(std::move(m), "xxx");
    }
    case StandardCode::FiveQubit: {
      const std::size_t dim = 32;
      ComplexVector zero = ComplexVector::Zero(dim);
      zero(0) = 1.0;
      for (const std::string& g : five_qubit_stabilizers()) {
        zero = 0.5 * (zero + pauli_string(g) * zero);
      }
      zero /= zero.norm();
      const ComplexVector one = pauli_string("XXXXX") * zero;
      ComplexMatrix m(dim, 2);
      m.col(0) = zero;
      m.col(1) = one;
      return Code(std::move(m), "five_qubit");
    }
  }
  throw InvalidArgument("unknown standard code");
}

Code perturb(const Code& code, const PerturbationSpec& spec, std::span<const Complex> pattern) {
  if (!(spec.magnitude >= 0.0) || !std::isfinite(spec.magnitude)) {
    throw InvalidArgument("perturbation magnitude must be finite and non-negative");
  }
  if (!pattern.empty() && pattern.size() != code.coefficient_count()) {
    throw DimensionError("perturbation pattern has " + std::to_string(pattern.size()) +
                         " entries, code has " + std::to_string(code.coefficient_count()) +
                         " coefficients");
  }
  ComplexMatrix m = code.amplitudes();
  const auto dim = static_cast<std::size_t>(m.rows());
  for (Eigen::Index k = 0; k < m.cols(); ++k) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const std::size_t flat = static_cast<std::size_t>(k) * dim + static_cast<std::size_t>(i);
      const Complex direction = pattern.empty() ? Complex(1.0, 0.0) : pattern[flat];
      m(i, k) += spec.magnitude * direction;
    }
  }
  Code out(std::move(m), code.label());
  return spec.renormalize ? out.normalized() : out;
}

Code gram_schmidt(const Code& code) {
  const ComplexMatrix& in = code.amplitudes();
  ComplexMatrix out(in.rows(), in.cols());
  for (Eigen::Index k = 0; k < in.cols(); ++k) {
    ComplexVector v = in.col(k);
    for (Eigen::Index j = 0; j < k; ++j) {
      v -= out.col(j).dot(in.col(k)) * out.col(j);
    }
    const double n = v.norm();
    if (n < kRankTolerance) {
      throw NumericalError("gram_schmidt: codeword " + std::to_string(k) +
                           " is linearly dependent on its predecessors (residual " +
                           std::to_string(n) + ")");
    }
    out.col(k) = v / n;
  }
  return Code(std::move(out), code.label());
}

ComplexMatrix gram_matrix(const Code& code) {
  return code.amplitudes().adjoint() * code.amplitudes();
}

ComplexMatrix code_projector(const Code& code) {
  const ComplexMatrix g = gram_matrix(code);
  const ComplexMatrix deviation = g - ComplexMatrix::Identity(g.rows(), g.cols());
  if (deviation.cwiseAbs().maxCoeff() > kProjectorOrthonormality) {
    throw NumericalError("code_projector: codewords are not orthonormal");
  }
  return code.amplitudes() * code.amplitudes().adjoint();
}

double max_ortho_residual(const Code& code) {
  const ComplexMatrix g = gram_matrix(code);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < g.cols(); ++j) worst = std::max(worst, std::abs(g(i, j)));
  }
  return worst;
}

double max_norm_deviation(const Code& code) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < code.amplitudes().cols(); ++k) {
    worst = std::max(worst, std::abs(1.0 - code.amplitudes().col(k).norm()));
  }
  return worst;
}

std::string format_exact(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

double parse_exact(const nlohmann::json& value) {
  if (value.is_number()) return value.get<double>();
  if (!value.is_string()) throw FormatError("amplitude component must be a decimal string");
  const std::string& text = value.get_ref<const std::string&>();
  char* end = nullptr;
  const double out = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw FormatError("malformed decimal '" + text + "'");
  }
  return out;
}

nlohmann::json code_to_json(const Code& code) {
  nlohmann::json words = nlohmann::json::array();
  for (Eigen::Index k = 0; k < code.amplitudes().cols(); ++k) {
    nlohmann::json w = nlohmann::json::array();
    for (Eigen::Index i = 0; i < code.amplitudes().rows(); ++i) {
      const Complex c = code.amplitudes()(i, k);
      w.push_back(nlohmann::json::array({format_exact(c.real()), format_exact(c.imag())}));
    }
    words.push_back(std::move(w));
  }
  return {{"label", code.label()}, {"qubits", code.qubits()}, {"codewords", std::move(words)}};
}

Code code_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("codewords") || !j.contains("qubits")) {
    throw FormatError("code file needs 'qubits' and 'codewords'");
  }
  const auto& words = j.at("codewords");
  if (!words.is_array() || words.empty()) throw FormatError("'codewords' must be a non-empty array");
  const auto qubits = j.at("qubits").get<std::size_t>();
  std::vector<Codeword> out;
  for (const auto& w : words) {
    if (!w.is_array()) throw FormatError("each codeword must be an array of [re, im] pairs");
    ComplexVector v(static_cast<Eigen::Index>(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i) {
      const auto& pair = w[i];
      if (!pair.is_array() || pair.size() != 2) throw FormatError("amplitude must be [re, im]");
      v(static_cast<Eigen::Index>(i)) = Complex(parse_exact(pair[0]), parse_exact(pair[1]));
    }
    Codeword cw(std::move(v));
    if (cw.qubits() != qubits) {
      throw DimensionError("codeword length " + std::to_string(cw.dimension()) +
                           " does not match qubits = " + std::to_string(qubits));
    }
    out.push_back(std::move(cw));
  }
  return Code(std::move(out), j.value("label", std::string{}));
}

Code load_code(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open code file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed code file " + path.string() + ": " + e.what());
  }
  try {
    return code_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed code file " + path.string() + ": " + e.what());
  }
}

void save_code(const Code& code, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write code file " + path.string());
  out << code_to_json(code).dump(2) << '\n';
}

}  // namespace qecgrad
