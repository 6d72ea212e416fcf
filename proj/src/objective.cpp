#include "qecgrad/objective.hpp"

#include <cmath>
#include <charconv>

#include "qecgrad/error.hpp"

namespace qecgrad {

FidelitySpec parse_fidelity_kind(std::string_view text) {
  if (text == "avg") return FidelitySpec::avg();
  if (text == "entanglement") return FidelitySpec::entanglement();
  if (text.substr(0, 4) == "per:") {
    const std::string_view digits = text.substr(4);
    std::size_t k = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && !digits.empty()) {
      return FidelitySpec::per(k);
    }
  }
  throw FormatError("unknown fidelity '" + std::string(text) +
                    "' (expected avg, per:<k> or entanglement)");
}

std::string to_string(const FidelitySpec& spec) {
  switch (spec.kind) {
    case FidelitySpec::Kind::AvgCodeword:
      return "avg";
    case FidelitySpec::Kind::PerCodeword:
      return "per:" + std::to_string(spec.index);
    case FidelitySpec::Kind::Entanglement:
      return "entanglement";
  }
  return "avg";
}

FidelityEvaluator::FidelityEvaluator(const QuantumChannel& noise, const QuantumChannel& recovery)
    : dim_(noise.dimension()), noise_count_(noise.size()), recovery_count_(recovery.size()) {
  if (recovery.dimension() != dim_) {
    throw DimensionError("noise and recovery dimensions differ");
  }
  const auto d = static_cast<Eigen::Index>(dim_);
  noise_stack_.resize(static_cast<Eigen::Index>(noise_count_) * d, d);
  for (std::size_t b = 0; b < noise_count_; ++b) {
    noise_stack_.middleRows(static_cast<Eigen::Index>(b) * d, d) = noise[b];
  }
  recovery_stack_.resize(static_cast<Eigen::Index>(recovery_count_) * d, d);
  for (std::size_t a = 0; a < recovery_count_; ++a) {
    recovery_stack_.middleRows(static_cast<Eigen::Index>(a) * d, d) = recovery[a].adjoint();
  }
}

ComplexMatrix FidelityEvaluator::prepared(const Code& code, bool raw) const {
  if (code.dimension() != dim_) {
    throw DimensionError("code dimension " + std::to_string(code.dimension()) +
                         " does not match channel dimension " + std::to_string(dim_));
  }
  return raw ? code.amplitudes() : code.normalized().amplitudes();
}

std::vector<double> FidelityEvaluator::codeword_fidelities(const Code& code, bool raw) const {
  const ComplexMatrix psi = prepared(code, raw);
  const auto d = static_cast<Eigen::Index>(dim_);
  const ComplexMatrix nv = noise_stack_ * psi;
  const ComplexMatrix rw = recovery_stack_ * psi;
  std::vector<double> out(code.size());
  for (std::size_t k = 0; k < code.size(); ++k) {
    const auto col = static_cast<Eigen::Index>(k);
    Eigen::Map<const ComplexMatrix> v(nv.col(col).data(), d,
                                      static_cast<Eigen::Index>(noise_count_));
    Eigen::Map<const ComplexMatrix> w(rw.col(col).data(), d,
                                      static_cast<Eigen::Index>(recovery_count_));
    const ComplexMatrix rho = v * v.adjoint();
    const ComplexMatrix rw_k = rho * w;
    out[k] = (w.conjugate().cwiseProduct(rw_k)).sum().real();
  }
  return out;
}

double FidelityEvaluator::entanglement_fidelity(const Code& code, bool raw) const {
  const ComplexMatrix psi = prepared(code, raw);
  const auto d = static_cast<Eigen::Index>(dim_);
  const auto kk = static_cast<Eigen::Index>(code.size());
  const auto m = static_cast<Eigen::Index>(noise_count_);
  const auto r = static_cast<Eigen::Index>(recovery_count_);
  const ComplexMatrix nv = noise_stack_ * psi;
  const ComplexMatrix rw = recovery_stack_ * psi;
  ComplexMatrix vs(kk * d, m);
  ComplexMatrix ws(kk * d, r);
  for (Eigen::Index k = 0; k < kk; ++k) {
    vs.middleRows(k * d, d) = Eigen::Map<const ComplexMatrix>(nv.col(k).data(), d, m);
    ws.middleRows(k * d, d) = Eigen::Map<const ComplexMatrix>(rw.col(k).data(), d, r);
  }
  // sum_{a,b} |sum_k w_{a,k}^dagger v_{b,k}|^2 = tr(W^dagger (V V^dagger) W)
  const ComplexMatrix g = vs * vs.adjoint();
  const ComplexMatrix gw = g * ws;
  const double total = (ws.conjugate().cwiseProduct(gw)).sum().real();
  return total / static_cast<double>(kk * kk);
}

double FidelityEvaluator::fidelity(const Code& code, const FidelitySpec& spec) const {
  switch (spec.kind) {
    case FidelitySpec::Kind::Entanglement:
      return entanglement_fidelity(code, spec.raw);
    case FidelitySpec::Kind::PerCodeword: {
      if (spec.index >= code.size()) {
        throw InvalidArgument("fidelity index " + std::to_string(spec.index) +
                              " out of range for " + std::to_string(code.size()) + " codewords");
      }
      return codeword_fidelities(code, spec.raw)[spec.index];
    }
    case FidelitySpec::Kind::AvgCodeword: {
      const std::vector<double> f = codeword_fidelities(code, spec.raw);
      double sum = 0.0;
      for (double v : f) sum += v;
      return sum / static_cast<double>(f.size());
    }
  }
  throw InvalidArgument("unknown fidelity kind");
}

double fidelity(const Code& code, const QuantumChannel& noise, const QuantumChannel& recovery,
                const FidelitySpec& spec) {
  return FidelityEvaluator(noise, recovery).fidelity(code, spec);
}

void LossParams::validate() const {
  if (!(std::isfinite(alpha) && alpha >= 0.0) || !(std::isfinite(beta) && beta >= 0.0)) {
    throw InvalidArgument("loss weights alpha and beta must be finite and non-negative");
  }
}

double ortho_penalty(const Code& code, double alpha) {
  double sum = 0.0;
  for (std::size_t i = 0; i < code.size(); ++i) {
    for (std::size_t j = i + 1; j < code.size(); ++j) {
      sum += std::norm(code.column(i).dot(code.column(j)));
    }
  }
  return alpha * sum;
}

double norm_penalty(const Code& code, double beta) {
  double sum = 0.0;
  for (std::size_t i = 0; i < code.size(); ++i) {
    const double xi = 1.0 - code.column(i).norm();
    sum += xi * xi;
  }
  return beta * sum;
}

double penalty(const Code& code, const LossParams& params) {
  return ortho_penalty(code, params.alpha) + norm_penalty(code, params.beta);
}

LossBreakdown loss_from_fidelity(double fidelity, const Code& code, const LossParams& params) {
  params.validate();
  LossBreakdown out;
  out.fidelity = fidelity;
  out.fidelity_term = (1.0 - fidelity) * (1.0 - fidelity);
  out.ortho_term = ortho_penalty(code, params.alpha);
  out.norm_term = norm_penalty(code, params.beta);
  out.total = out.fidelity_term + out.ortho_term + out.norm_term;
  return out;
}

LossBreakdown loss(const Code& code, const QuantumChannel& noise, const QuantumChannel& recovery,
                   const FidelitySpec& spec, const LossParams& params) {
  return loss_from_fidelity(fidelity(code, noise, recovery, spec), code, params);
}

std::pair<double, double> inner_product_parts(const Codeword& i, const Codeword& j) {
  if (i.dimension() != j.dimension()) throw DimensionError("inner_product_parts: length mismatch");
  double f = 0.0;
  double g = 0.0;
  const ComplexVector& a = i.amplitudes();
  const ComplexVector& b = j.amplitudes();
  for (Eigen::Index p = 0; p < a.size(); ++p) {
    const double x = a[p].real(), y = a[p].imag();
    const double u = b[p].real(), v = b[p].imag();
    f += x * u + y * v;
    g += y * u - x * v;
  }
  return {f, g};
}

}  // namespace qecgrad
