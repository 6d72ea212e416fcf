#include <algorithm>
#include <fstream>
#include <utility>

#include "qecgrad/cli.hpp"
#include "qecgrad/error.hpp"

#ifndef QECGRAD_DATA_DIR
#define QECGRAD_DATA_DIR "data"
#endif

namespace qecgrad::cli {

namespace detail {
extern const std::pair<const char*, const char*> kPresets[];
extern const std::size_t kPresetCount;
}  // namespace detail

nlohmann::json default_config() {
  return nlohmann::json::parse(R"({
    "code": "five_qubit",
    "anchor_code": null,
    "channel": {"kind": "pauli", "px": 0.05, "py": 0.05, "pz": 0.05, "gamma": 0.0},
    "recovery": {"kind": "petz", "anchor": "code_projector", "refresh": "frozen"},
    "fidelity": "avg",
    "raw_fidelity": false,
    "alpha": 0.0,
    "beta": 0.0,
    "delta": 1e-4,
    "scheme": "forward",
    "threads": 1,
    "mode": "plain",
    "learning_rate": 1e-3,
    "steps": 0,
    "seed": null,
    "gradient_noise": 0.0,
    "analytic_penalty": true,
    "project": null,
    "sanity": {
      "codes": ["xxx", "zzz"],
      "perturbation": 0.05,
      "deltas": [0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001, 0.0005, 0.0002, 0.0001],
      "symmetry_strengths": [0.01, 0.05, 0.1],
      "symmetry_recoveries": ["identity", "petz"],
      "symmetry_delta": 1e-5,
      "symmetry_scheme": "central",
      "tolerance": 1e-9
    },
    "gradscan": {
      "kind": "pauli",
      "strengths": [0.0, 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1],
      "offset": 0.01,
      "symmetry_delta": 1e-3,
      "symmetry_scheme": "central4",
      "tolerance": 1e-9
    },
    "calibrate": {
      "norm_target": 0.917,
      "norm_tolerance": 0.002,
      "strength_max": 0.3,
      "strength_step": 0.005,
      "fidelity_targets": [
        {"code": "five_qubit", "p": 0.01, "target": 0.9821, "tolerance": 0.0005, "anchor": true},
        {"code": "five_qubit", "p": 0.05, "target": 0.783, "tolerance": 0.005, "anchor": true},
        {"code": "five_qubit_optimized", "p": 0.05, "target": 0.915, "tolerance": 0.005, "anchor": false}
      ]
    }
  })");
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < detail::kPresetCount; ++i) names.emplace_back(detail::kPresets[i].first);
  return names;
}

nlohmann::json preset(std::string_view name) {
  for (std::size_t i = 0; i < detail::kPresetCount; ++i) {
    if (name == detail::kPresets[i].first) {
      nlohmann::json j = nlohmann::json::parse(detail::kPresets[i].second);
      j.erase("command");
      j.erase("description");
      return j;
    }
  }
  throw InvalidArgument("unknown preset '" + std::string(name) + "'");
}

nlohmann::json merge(nlohmann::json base, const nlohmann::json& overlay) {
  if (!base.is_object() || !overlay.is_object()) return overlay;
  for (auto it = overlay.begin(); it != overlay.end(); ++it) {
    base[it.key()] = base.contains(it.key()) ? merge(base[it.key()], it.value()) : it.value();
  }
  return base;
}

namespace {

void check_keys_against(const nlohmann::json& doc, const nlohmann::json& ref,
                        const std::string& prefix) {
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!ref.contains(it.key())) throw FormatError("unknown config key '" + prefix + it.key() + "'");
    const nlohmann::json& r = ref[it.key()];
    // Nested blocks other than channel/recovery are checked one level down.
    if (it.value().is_object() && r.is_object() && it.key() != "channel" &&
        it.key() != "recovery") {
      check_keys_against(it.value(), r, prefix + it.key() + ".");
    }
  }
}

std::string text(const nlohmann::json& doc, const char* key) {
  const nlohmann::json& v = doc.at(key);
  if (!v.is_string()) throw FormatError(std::string("config key '") + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

void check_keys(const nlohmann::json& doc) {
  if (!doc.is_object()) throw FormatError("run config must be a JSON object");
  check_keys_against(doc, default_config(), "");
}

Code resolve_code(const std::string& ref) {
  try {
    return standard_code(parse_standard_code(ref));
  } catch (const InvalidArgument&) {
  }
  namespace fs = std::filesystem;
  const fs::path direct(ref);
  if (fs::exists(direct)) return load_code(direct);
  for (const fs::path& p : {fs::path(QECGRAD_DATA_DIR) / ref, fs::path(QECGRAD_DATA_DIR) / (ref + ".json")}) {
    if (fs::exists(p)) return load_code(p);
  }
  throw InvalidArgument("code '" + ref + "' is neither a standard code nor a readable file");
}

Code RunConfig::code() const { return resolve_code(text(doc, "code")); }

std::optional<Code> RunConfig::anchor_code() const {
  if (!doc.contains("anchor_code") || doc["anchor_code"].is_null()) return std::nullopt;
  return resolve_code(text(doc, "anchor_code"));
}

ChannelSpec RunConfig::channel(const Code& for_code) const {
  nlohmann::json j = doc.at("channel");
  if (!j.contains("qubits")) j["qubits"] = for_code.qubits();
  return channel_spec_from_json(j);
}

RecoverySpec RunConfig::recovery() const { return recovery_spec_from_json(doc.at("recovery")); }

FidelitySpec RunConfig::fidelity() const {
  FidelitySpec spec = parse_fidelity_kind(text(doc, "fidelity"));
  spec.raw = doc.at("raw_fidelity").get<bool>();
  return spec;
}

FDConfig RunConfig::fd() const {
  FDConfig cfg;
  cfg.delta = doc.at("delta").get<double>();
  cfg.scheme = parse_fd_scheme(text(doc, "scheme"));
  cfg.validate();
  return cfg;
}

OptimizerConfig RunConfig::optimizer() const {
  OptimizerConfig cfg;
  const std::string mode = text(doc, "mode");
  if (mode == "plain") {
    cfg.mode = OptimizerConfig::Mode::Plain;
  } else if (mode == "stabilized") {
    cfg.mode = OptimizerConfig::Mode::Stabilized;
  } else {
    throw FormatError("unknown optimizer mode '" + mode + "'");
  }
  cfg.learning_rate = doc.at("learning_rate").get<double>();
  cfg.steps = doc.at("steps").get<std::size_t>();
  cfg.fd = fd();
  cfg.loss = {doc.at("alpha").get<double>(), doc.at("beta").get<double>()};
  cfg.fidelity = fidelity();
  cfg.recovery = recovery();
  if (!doc.at("seed").is_null()) cfg.seed = doc.at("seed").get<std::uint64_t>();
  cfg.gradient_noise = doc.at("gradient_noise").get<double>();
  cfg.analytic_penalty = doc.at("analytic_penalty").get<bool>();
  if (!doc.at("project").is_null()) cfg.project = doc.at("project").get<bool>();
  cfg.threads = threads;
  cfg.validate();
  return cfg;
}

}  // namespace qecgrad::cli
