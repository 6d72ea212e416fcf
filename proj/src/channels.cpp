#include "qecgrad/channels.hpp"

#include <cmath>

#include "qecgrad/error.hpp"

namespace qecgrad {

namespace {

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument(std::string(name) + " = " + std::to_string(p) + " is outside [0, 1]");
  }
}

void require_complete(const QuantumChannel& ch, const char* what) {
  const double err = ch.completeness_error();
  if (err > kCompletenessTolerance) {
    throw NumericalError(std::string(what) + ": Kraus set not trace preserving (error " +
                         std::to_string(err) + ")");
  }
}

}  // namespace

QuantumChannel::QuantumChannel(std::vector<ComplexMatrix> kraus, std::string label)
    : kraus_(std::move(kraus)), label_(std::move(label)) {
  if (kraus_.empty()) throw InvalidArgument("a channel needs at least one Kraus operator");
  dimension_ = static_cast<std::size_t>(kraus_.front().rows());
  for (const ComplexMatrix& k : kraus_) {
    if (static_cast<std::size_t>(k.rows()) != dimension_ ||
        static_cast<std::size_t>(k.cols()) != dimension_) {
      throw DimensionError("Kraus operators must be square and of equal dimension");
    }
    if (!all_finite(k)) throw NumericalError("Kraus operator has non-finite entries");
  }
}

ComplexMatrix QuantumChannel::completeness() const {
  const auto n = static_cast<Eigen::Index>(dimension_);
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (const ComplexMatrix& k : kraus_) sum.noalias() += k.adjoint() * k;
  return sum;
}

double QuantumChannel::completeness_error() const {
  const auto n = static_cast<Eigen::Index>(dimension_);
  return (completeness() - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

std::vector<ComplexMatrix> prune_kraus(std::vector<ComplexMatrix> kraus, double threshold) {
  std::vector<ComplexMatrix> kept;
  kept.reserve(kraus.size());
  for (ComplexMatrix& k : kraus) {
    if (k.norm() >= threshold) kept.push_back(std::move(k));
  }
  return kept;
}

QuantumChannel identity_channel(std::size_t dim) {
  return QuantumChannel({identity(dim)}, "identity");
}

QuantumChannel pauli_channel_1q(const PauliParams& p) {
  require_probability(p.px, "px");
  require_probability(p.py, "py");
  require_probability(p.pz, "pz");
  const double total = p.px + p.py + p.pz;
  if (total > 1.0 + 1e-15) {
    throw InvalidArgument("Pauli probabilities sum to " + std::to_string(total) + " > 1");
  }
  const double pi = std::max(0.0, 1.0 - total);
  std::vector<ComplexMatrix> kraus{std::sqrt(pi) * pauli('I'), std::sqrt(p.px) * pauli('X'),
                                   std::sqrt(p.py) * pauli('Y'), std::sqrt(p.pz) * pauli('Z')};
  QuantumChannel ch(prune_kraus(std::move(kraus)), "pauli");
  require_complete(ch, "pauli_channel_1q");
  return ch;
}

QuantumChannel amplitude_damping_1q(double gamma) {
  require_probability(gamma, "gamma");
  ComplexMatrix k0 = ComplexMatrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  ComplexMatrix k1 = ComplexMatrix::Zero(2, 2);
  k1(0, 1) = std::sqrt(gamma);
  QuantumChannel ch(prune_kraus({std::move(k0), std::move(k1)}), "damping");
  require_complete(ch, "amplitude_damping_1q");
  return ch;
}

QuantumChannel lift_iid(const QuantumChannel& single, std::size_t n) {
  if (single.dimension() != 2) throw DimensionError("lift_iid expects a single-qubit channel");
  if (n < 1) throw InvalidArgument("lift_iid needs at least one qubit");
  if (n >= 63 || (std::size_t{1} << n) > max_dimension()) {
    throw DimensionError("lift_iid: 2^" + std::to_string(n) + " exceeds maximum dimension " +
                         std::to_string(max_dimension()));
  }
  std::vector<ComplexMatrix> ops = single.kraus();
  for (std::size_t q = 1; q < n; ++q) {
    std::vector<ComplexMatrix> next;
    next.reserve(ops.size() * single.size());
    for (const ComplexMatrix& a : ops) {
      for (const ComplexMatrix& b : single.kraus()) next.push_back(kron(a, b));
    }
    ops = prune_kraus(std::move(next));
  }
  QuantumChannel ch(std::move(ops), single.label() + "^" + std::to_string(n));
  require_complete(ch, "lift_iid");
  return ch;
}

ComplexMatrix apply(const QuantumChannel& channel, const ComplexMatrix& rho) {
  if (static_cast<std::size_t>(rho.rows()) != channel.dimension() ||
      static_cast<std::size_t>(rho.cols()) != channel.dimension()) {
    throw DimensionError("apply: state dimension " + std::to_string(rho.rows()) +
                         " does not match channel dimension " +
                         std::to_string(channel.dimension()));
  }
  ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
  ComplexMatrix tmp(rho.rows(), rho.cols());
  for (const ComplexMatrix& k : channel.kraus()) {
    tmp.noalias() = k * rho;
    out.noalias() += tmp * k.adjoint();
  }
  return out;
}

QuantumChannel compose(const QuantumChannel& after, const QuantumChannel& before) {
  if (after.dimension() != before.dimension()) {
    throw DimensionError("compose: channel dimensions differ");
  }
  std::vector<ComplexMatrix> ops;
  ops.reserve(after.size() * before.size());
  for (const ComplexMatrix& a : after.kraus()) {
    for (const ComplexMatrix& b : before.kraus()) ops.push_back(a * b);
  }
  ops = prune_kraus(std::move(ops));
  if (ops.empty()) {
    const auto n = static_cast<Eigen::Index>(after.dimension());
    ops.push_back(ComplexMatrix::Zero(n, n));
  }
  return QuantumChannel(std::move(ops), after.label() + "*" + before.label());
}

QuantumChannel build_channel(const ChannelSpec& spec) {
  const QuantumChannel single = spec.kind == ChannelSpec::Kind::Pauli
                                    ? pauli_channel_1q(spec.pauli)
                                    : amplitude_damping_1q(spec.gamma);
  return spec.qubits == 1 ? single : lift_iid(single, spec.qubits);
}

nlohmann::json channel_spec_to_json(const ChannelSpec& spec) {
  nlohmann::json j;
  j["kind"] = spec.kind == ChannelSpec::Kind::Pauli ? "pauli" : "damping";
  j["px"] = spec.pauli.px;
  j["py"] = spec.pauli.py;
  j["pz"] = spec.pauli.pz;
  j["gamma"] = spec.gamma;
  j["qubits"] = spec.qubits;
  return j;
}

ChannelSpec channel_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("channel spec must be an object");
  ChannelSpec spec;
  const std::string kind = j.value("kind", std::string("pauli"));
  if (kind == "pauli") {
    spec.kind = ChannelSpec::Kind::Pauli;
  } else if (kind == "damping") {
    spec.kind = ChannelSpec::Kind::Damping;
  } else {
    throw FormatError("unknown channel kind '" + kind + "'");
  }
  spec.pauli.px = j.value("px", 0.0);
  spec.pauli.py = j.value("py", 0.0);
  spec.pauli.pz = j.value("pz", 0.0);
  spec.gamma = j.value("gamma", 0.0);
  spec.qubits = j.value("qubits", std::size_t{1});
  return spec;
}

}  // namespace qecgrad
