#include "qecgrad/testkit.hpp"

#include <cmath>
#include <string>

#include "qecgrad/error.hpp"
#include "qecgrad/gradient.hpp"
#include "qecgrad/objective.hpp"
#include "qecgrad/recovery.hpp"

namespace qecgrad::testkit {

std::uint64_t SeededGenerator::next_u64() noexcept {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SeededGenerator::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededGenerator::gaussian() noexcept {
  double sum = 0.0;
  for (int i = 0; i < 12; ++i) sum += uniform();
  return sum - 6.0;
}

ComplexMatrix SeededGenerator::gaussian_matrix(std::size_t rows, std::size_t cols) {
  ComplexMatrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = complex_gaussian();
  }
  return g;
}

ComplexMatrix SeededGenerator::hermitian(std::size_t dim) {
  const ComplexMatrix g = gaussian_matrix(dim, dim);
  return (g + g.adjoint()) / 2.0;
}

ComplexMatrix SeededGenerator::psd(std::size_t dim, std::size_t rank) {
  const ComplexMatrix g = gaussian_matrix(dim, rank);
  return g * g.adjoint();
}

ComplexMatrix SeededGenerator::density(std::size_t dim) {
  const ComplexMatrix m = psd(dim, dim);
  return m / m.trace().real();
}

ComplexMatrix SeededGenerator::unitary(std::size_t dim) {
  const ComplexMatrix g = gaussian_matrix(dim, dim);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  return qr.householderQ() * ComplexMatrix::Identity(g.rows(), g.cols());
}

Code SeededGenerator::code(std::size_t qubits, std::size_t words, double lo, double hi) {
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << qubits);
  ComplexMatrix a(dim, static_cast<Eigen::Index>(words));
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      const double re = uniform(lo, hi);
      const double im = uniform(lo, hi);
      a(i, j) = Complex(re, im);
    }
  }
  return Code(std::move(a), "random");
}

PauliParams SeededGenerator::pauli_params(double max_each) {
  const double px = uniform(0.0, max_each);
  const double py = uniform(0.0, max_each);
  const double pz = uniform(0.0, max_each);
  return {px, py, pz};
}

RealVector fd_oracle(const RealFunction& f, const RealVector& point, double delta) {
  RealVector grad(point.size());
  RealVector probe = point;
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    probe[i] = point[i] + delta;
    const double up = f(probe);
    probe[i] = point[i] - delta;
    const double down = f(probe);
    probe[i] = point[i];
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NumericalError("fd_oracle: non-finite value at component " + std::to_string(i));
    }
    grad[i] = (up - down) / (2.0 * delta);
  }
  return grad;
}

RealVector code_to_real(const Code& code) {
  const auto n = static_cast<Eigen::Index>(code.coefficient_count());
  RealVector v(2 * n);
  Eigen::Index c = 0;
  for (std::size_t w = 0; w < code.size(); ++w) {
    for (std::size_t i = 0; i < code.dimension(); ++i, ++c) {
      v[c] = code.coefficient(w, i).real();
      v[n + c] = code.coefficient(w, i).imag();
    }
  }
  return v;
}

Code code_from_real(const RealVector& v, std::size_t words, std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(words * dim);
  if (v.size() != 2 * n) throw DimensionError("code_from_real: length mismatch");
  ComplexMatrix a(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(words));
  Eigen::Index c = 0;
  for (Eigen::Index w = 0; w < a.cols(); ++w) {
    for (Eigen::Index i = 0; i < a.rows(); ++i, ++c) a(i, w) = Complex(v[c], v[n + c]);
  }
  return Code(std::move(a));
}

double channel_action_equal(const QuantumChannel& a, const QuantumChannel& b, std::size_t trials,
                            std::uint64_t seed) {
  if (a.dimension() != b.dimension()) throw DimensionError("channel dimensions differ");
  SeededGenerator gen(seed);
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const ComplexMatrix rho = gen.density(a.dimension());
    worst = std::max(worst, (qecgrad::apply(a, rho) - qecgrad::apply(b, rho)).norm());
  }
  return worst;
}

ComplexMatrix kron_oracle(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      out(i, j) = a(i / b.rows(), j / b.cols()) * b(i % b.rows(), j % b.cols());
    }
  }
  return out;
}

ComplexMatrix pauli_on(char p, std::size_t q, std::size_t n) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (std::size_t k = 0; k < n; ++k) out = kron_oracle(out, pauli(k == q ? p : 'I'));
  return out;
}

QuantumChannel single_error_channel(std::size_t n, double p) {
  const double p0 = 1.0 - 3.0 * static_cast<double>(n) * p;
  if (p < 0.0 || p0 < 0.0) throw InvalidArgument("single_error_channel: p out of range");
  std::vector<ComplexMatrix> ops{std::sqrt(p0) * identity(std::size_t{1} << n)};
  for (std::size_t q = 0; q < n; ++q) {
    for (char c : {'X', 'Y', 'Z'}) ops.push_back(std::sqrt(p) * pauli_on(c, q, n));
  }
  return QuantumChannel(std::move(ops), "single_error");
}

QuantumChannel remixed(const QuantumChannel& ch, const ComplexMatrix& u) {
  if (static_cast<std::size_t>(u.rows()) != ch.size()) throw DimensionError("mixing size");
  std::vector<ComplexMatrix> ops;
  for (std::size_t i = 0; i < ch.size(); ++i) {
    ComplexMatrix k = ComplexMatrix::Zero(ch[0].rows(), ch[0].cols());
    for (std::size_t j = 0; j < ch.size(); ++j) {
      k += u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * ch[j];
    }
    ops.push_back(std::move(k));
  }
  return QuantumChannel(std::move(ops), ch.label() + "~");
}

double reference_codeword_fidelity(const Code& code, std::size_t k, const QuantumChannel& noise,
                                   const QuantumChannel& recovery, bool raw) {
  ComplexVector psi = code.column(k);
  if (!raw) psi /= psi.norm();
  const ComplexMatrix rho = psi * psi.adjoint();
  const ComplexMatrix out = qecgrad::apply(recovery, qecgrad::apply(noise, rho));
  return (psi.adjoint() * out * psi)(0, 0).real();
}

double reference_entanglement_fidelity(const Code& code, const QuantumChannel& noise,
                                       const QuantumChannel& recovery, bool raw) {
  const std::size_t kk = code.size();
  const ComplexMatrix ref = identity(kk);
  ComplexVector phi = ComplexVector::Zero(static_cast<Eigen::Index>(code.dimension() * kk));
  for (std::size_t k = 0; k < kk; ++k) {
    ComplexVector psi = code.column(k);
    if (!raw) psi /= psi.norm();
    ComplexMatrix e = ComplexMatrix::Zero(static_cast<Eigen::Index>(kk), 1);
    e(static_cast<Eigen::Index>(k), 0) = 1.0;
    phi += kron_oracle(ComplexMatrix(psi), e).col(0);
  }
  phi /= std::sqrt(static_cast<double>(kk));
  auto lifted = [&](const QuantumChannel& ch) {
    std::vector<ComplexMatrix> ops;
    for (const ComplexMatrix& op : ch.kraus()) ops.push_back(kron_oracle(op, ref));
    return QuantumChannel(std::move(ops));
  };
  const ComplexMatrix rho = phi * phi.adjoint();
  const ComplexMatrix noisy = qecgrad::apply(lifted(noise), rho);
  const ComplexMatrix out = qecgrad::apply(lifted(recovery), noisy);
  return (phi.adjoint() * out * phi)(0, 0).real();
}

Code five_qubit_oracle() {
  const char* gens[4] = {"XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"};
  ComplexVector v = ComplexVector::Zero(32);
  v[0] = 1.0;
  for (const char* g : gens) {
    ComplexMatrix op = ComplexMatrix::Identity(1, 1);
    for (int q = 0; q < 5; ++q) op = kron_oracle(op, pauli(g[q]));
    v = (v + op * v) / 2.0;
  }
  v /= v.norm();
  ComplexMatrix x5 = ComplexMatrix::Identity(1, 1);
  for (int q = 0; q < 5; ++q) x5 = kron_oracle(x5, pauli('X'));
  ComplexMatrix a(32, 2);
  a.col(0) = v;
  a.col(1) = x5 * v;
  return Code(std::move(a), "five_qubit");
}

namespace {

nlohmann::json entry(const char* oracle, std::uint64_t seed, nlohmann::json value) {
  return {{"oracle", oracle}, {"seed", seed}, {"value", std::move(value)}};
}

nlohmann::json matrix_entries(const ComplexMatrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != Complex(0.0, 0.0)) {
        out.push_back(nlohmann::json::array({i, j, m(i, j).real(), m(i, j).imag()}));
      }
    }
  }
  return out;
}

nlohmann::json fidelity_block(const Code& code, const QuantumChannel& noise,
                              const QuantumChannel& recovery) {
  nlohmann::json j;
  for (bool raw : {false, true}) {
    nlohmann::json per = nlohmann::json::array();
    for (std::size_t k = 0; k < code.size(); ++k) {
      per.push_back(reference_codeword_fidelity(code, k, noise, recovery, raw));
    }
    const char* tag = raw ? "raw" : "normalized";
    j[tag]["codeword"] = per;
    j[tag]["entanglement"] = reference_entanglement_fidelity(code, noise, recovery, raw);
  }
  return j;
}

// Central-difference Wirtinger norms per codeword of a real function of the code.
nlohmann::json word_norms(const std::function<double(const Code&)>& f, const Code& code,
                          double delta) {
  const std::size_t n = code.coefficient_count();
  const RealVector g = fd_oracle(
      [&](const RealVector& v) { return f(code_from_real(v, code.size(), code.dimension())); },
      code_to_real(code), delta);
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t w = 0; w < code.size(); ++w) {
    double sum = 0.0;
    for (std::size_t i = 0; i < code.dimension(); ++i) {
      const auto c = static_cast<Eigen::Index>(w * code.dimension() + i);
      sum += g[c] * g[c] + g[static_cast<Eigen::Index>(n) + c] * g[static_cast<Eigen::Index>(n) + c];
    }
    out.push_back(std::sqrt(sum));
  }
  return out;
}

}  // namespace

nlohmann::json derived_values() {
  nlohmann::json j;

  j["kron_x_z"] = entry("kron_oracle", 0, matrix_entries(kron_oracle(pauli('X'), pauli('Z'))));
  j["five_qubit_code"] = entry("stabilizer_projection", 0, code_to_json(five_qubit_oracle()));

  // 2-word single-qubit Gram-Schmidt by hand: [2,0] -> [1,0]; [1,1] - [1,0] -> [0,1].
  j["gram_schmidt_2_0__1_1"] =
      entry("hand_gram_schmidt", 0, nlohmann::json::array({{1.0, 0.0}, {0.0, 1.0}}));

  {
    // |z|^2 at z = 1 + i: d/dx = 2x, d/dy = 2y; |df/dz-bar| at z = 1 is |z| = 1.
    const RealFunction f = [](const RealVector& v) { return v[0] * v[0] + v[1] * v[1]; };
    RealVector p(2);
    p << 1.0, 1.0;
    const RealVector g = fd_oracle(f, p, 1e-6);
    j["abs_sq_gradient_1_plus_i"] =
        entry("fd_oracle", 0, {{"dx", g[0]}, {"dy", g[1]}, {"slope", std::hypot(g[0], g[1])}});
    p << 1.0, 0.0;
    const RealVector g1 = fd_oracle(f, p, 1e-6);
    j["abs_sq_dzbar_at_1"] = entry("fd_oracle", 0, 0.5 * std::hypot(g1[0], g1[1]));
  }
  {
    RealVector p(2);
    p << 1.0, 2.0;
    const RealVector g =
        fd_oracle([](const RealVector& v) { return v.squaredNorm(); }, p, 1e-5);
    j["sum_squares_gradient_1_2"] = entry("fd_oracle", 0, {g[0], g[1]});
  }
  {
    // K = |<i|j>|^2 for {[1,0],[1,0]}; d/dx_0 of the first word.
    ComplexMatrix a(2, 2);
    a << 1.0, 1.0, 0.0, 0.0;
    const Code pair(a);
    const RealVector g = fd_oracle(
        [](const RealVector& v) { return ortho_penalty(code_from_real(v, 2, 2), 1.0); },
        code_to_real(pair), 1e-6);
    j["ortho_pair_dk_dx0"] = entry("fd_oracle", 0, g[0]);

    ComplexMatrix b(2, 1);
    b << 2.0, 0.0;
    const RealVector gn = fd_oracle(
        [](const RealVector& v) { return norm_penalty(code_from_real(v, 1, 2), 1.0); },
        code_to_real(Code(b)), 1e-6);
    j["norm_single_2_0_dx0_exact"] = entry("fd_oracle", 0, gn[0]);
    // Printed formula -4 beta xi x_p with xi = 1 - 2, x_0 = 2.
    j["norm_single_2_0_dx0_paper_literal"] = entry("hand_formula", 0, -4.0 * (1.0 - 2.0) * 2.0);
  }

  {
    const Code five = five_qubit_oracle();
    const ComplexMatrix sigma = code_state(five);
    nlohmann::json blocks;
    for (double p : {0.01, 0.05}) {
      const QuantumChannel noise = lift_iid(pauli_channel_1q(PauliParams::isotropic(p)), 5);
      const QuantumChannel rec = petz(noise, sigma).channel;
      char key[32];
      std::snprintf(key, sizeof key, "p=%g", p);
      blocks[key]["petz"] = fidelity_block(five, noise, rec);
      blocks[key]["identity"] = fidelity_block(five, noise, identity_recovery(32));
    }
    j["five_qubit_iid_pauli_fidelity"] = entry("reference_apply", 0, blocks);
  }

  {
    // Gradient norms of the reference fidelities for the repetition codes,
    // identity recovery, isotropic p = 0.05, raw evaluation.
    nlohmann::json out;
    const QuantumChannel noise = lift_iid(pauli_channel_1q(PauliParams::isotropic(0.05)), 3);
    const QuantumChannel rec = identity_recovery(8);
    for (StandardCode sc : {StandardCode::Xxx, StandardCode::Zzz}) {
      const Code code = standard_code(sc);
      const std::string name(to_string(sc));
      out[name]["avg"] = word_norms(
          [&](const Code& c) {
            return 0.5 * (reference_codeword_fidelity(c, 0, noise, rec, true) +
                          reference_codeword_fidelity(c, 1, noise, rec, true));
          },
          code, 1e-5);
      out[name]["entanglement"] = word_norms(
          [&](const Code& c) { return reference_entanglement_fidelity(c, noise, rec, true); }, code,
          1e-5);
    }
    j["repetition_gradient_norms_raw_p0.05_identity"] = entry("fd_oracle/reference_apply", 0, out);
  }

  {
    SeededGenerator gen(20240601);
    const Code code = gen.code(2, 2);
    const QuantumChannel noise = lift_iid(pauli_channel_1q(gen.pauli_params(0.1)), 2);
    const QuantumChannel rec = petz(noise, code_state(code)).channel;
    j["random_code_fidelity"] =
        entry("reference_apply", gen.seed(),
              {{"code", code_to_json(code)}, {"fidelity", fidelity_block(code, noise, rec)}});
  }
  return j;
}

}  // namespace qecgrad::testkit
