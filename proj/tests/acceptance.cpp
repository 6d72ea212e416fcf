// Acceptance suite: one PASS/FAIL line per criterion, details indented below.
// Optional arguments select criteria by number, e.g. `qecgrad_acceptance 1 7 8`.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "qecgrad/cli.hpp"
#include "qecgrad/error.hpp"
#include "qecgrad/testkit.hpp"

using namespace qecgrad;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void note(const std::string& what) { notes.push_back("     " + what); }
};

std::string num(double v, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path workdir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "qecgrad_acceptance" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

cli::RunConfig preset_config(const std::string& name, const fs::path& out, std::size_t threads) {
  cli::RunConfig cfg;
  cfg.doc = cli::merge(cli::default_config(), cli::preset(name));
  cfg.doc["threads"] = threads;
  cfg.threads = threads;
  cfg.out_dir = out;
  return cfg;
}

double spread(const std::vector<double>& v) {
  double lo = v.front(), hi = v.front();
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  return hi - lo;
}

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i], 8);
  return s + "]";
}

// The calibrated fidelity configuration shipped in the presets.
FidelitySpec calibrated_fidelity() {
  cli::RunConfig cfg;
  cfg.doc = cli::merge(cli::default_config(), cli::preset("table1"));
  return cfg.fidelity();
}

Outcome symmetry_suite() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const FidelitySpec spec = calibrated_fidelity();
  const FDConfig fd{1e-5, FDConfig::Scheme::Central};
  const Code xxx = standard_code(StandardCode::Xxx), zzz = standard_code(StandardCode::Zzz);
  const Code xxx_m = perturb(xxx, {0.05, true}), zzz_m = perturb(zzz, {0.05, true});
  for (double p : {0.01, 0.05, 0.1}) {
    const QuantumChannel noise = lift_iid(pauli_channel_1q(PauliParams::isotropic(p)), 3);
    for (RecoverySpec::Kind kind : {RecoverySpec::Kind::Identity, RecoverySpec::Kind::Petz}) {
      RecoverySpec rs;
      rs.kind = kind;
      auto norms = [&](const Code& c) {
        return cli::codeword_gradient_norms(c, noise, build_recovery(rs, c, noise), spec, fd, 1);
      };
      const std::vector<double> nx = norms(xxx), nz = norms(zzz);
      const std::vector<double> mx = norms(xxx_m), mz = norms(zzz_m);
      const std::string tag = "p=" + num(p) + " " + std::string(to_string(kind));
      o.check(std::abs(nx[0] - nz[0]) <= 1e-9 && std::abs(nx[1] - nz[1]) <= 1e-9,
              tag + " XXX " + list(nx) + " vs ZZZ " + list(nz));
      o.check(spread(nx) <= 1e-9 && spread(nz) <= 1e-9, tag + " |0_L> vs |1_L> within each code");
      double div = 0.0;
      for (std::size_t k = 0; k < 2; ++k) div = std::max(div, std::abs(mx[k] - mz[k]));
      o.check(div > 1e-3, tag + " perturbed codes diverge by " + num(div));
    }
  }
  const double secs = seconds_since(t0);
  o.check(secs < 10.0, "runtime " + num(secs, 3) + " s < 10 s");
  return o;
}

Outcome calibration_target() {
  Outcome o;
  const fs::path out = workdir("calibration");
  cli::RunConfig cfg = preset_config("table1", out, 1);
  const FidelitySpec spec = cfg.fidelity();
  const Code xxx = standard_code(StandardCode::Xxx), zzz = standard_code(StandardCode::Zzz);
  const QuantumChannel noise = build_channel(cfg.channel(xxx));
  const FDConfig fd{1e-4, FDConfig::Scheme::Forward};
  for (const Code* c : {&xxx, &zzz}) {
    const std::vector<double> n = cli::codeword_gradient_norms(
        *c, noise, build_recovery(cfg.recovery(), *c, noise), spec, fd, 1);
    o.check(std::abs(n[0] - 0.917) <= 0.002 && std::abs(n[1] - 0.917) <= 0.002,
            "preset table1 " + c->label() + " norms " + list(n) + " vs 0.917 +- 0.002");
  }
  cfg.calibrate = true;
  cfg.doc["sanity"]["symmetry_strengths"] = {0.05};
  cli::cmd_sanity(cfg);
  const nlohmann::json cal = nlohmann::json::parse(slurp(out / "calibration.json"));
  const nlohmann::json& best = cal.at("best");
  o.check(cal.at("matched").get<bool>(),
          "scan best: " + best.at("fidelity").get<std::string>() +
              (best.at("raw_fidelity").get<bool>() ? " raw " : " normalized ") +
              best.at("recovery").get<std::string>() + " p=" +
              num(best.value("strength", std::nan("")), 8) + " norm=" +
              num(best.value("norm", std::nan("")), 8));
  int matches = 0;
  for (const auto& e : cal.at("configurations")) matches += e.at("matched").get<bool>() ? 1 : 0;
  o.note(std::to_string(matches) + " of " + std::to_string(cal.at("configurations").size()) +
         " scanned configurations reach the target");
  return o;
}

Outcome unidirectional_invariance() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  cli::RunConfig cfg = preset_config("fig2", workdir("fig2"), 1);
  const FidelitySpec spec = cfg.fidelity();
  const Code five = standard_code(StandardCode::FiveQubit);
  const FDConfig fd{cfg.doc["gradscan"]["symmetry_delta"].get<double>(),
                    parse_fd_scheme(cfg.doc["gradscan"]["symmetry_scheme"].get<std::string>())};
  for (double p : {0.01, 0.03, 0.05, 0.1}) {
    std::vector<double> n;
    for (const PauliParams& pp : {PauliParams{p, 0, 0}, PauliParams{0, p, 0}, PauliParams{0, 0, p}}) {
      const QuantumChannel noise = lift_iid(pauli_channel_1q(pp), 5);
      const QuantumChannel rec = build_recovery(cfg.recovery(), five, noise);
      const FidelityEvaluator ev(noise, rec);
      n.push_back(fd_gradient([&](const Code& c) { return ev.fidelity(c, spec); }, five, fd, 1).norm);
    }
    o.check(spread(n) <= 1e-9, "p=" + num(p) + " X/Y/Z norms " + list(n) + " spread " + num(spread(n), 3));
  }
  const double secs = seconds_since(t0);
  o.check(secs < 120.0, "runtime " + num(secs, 3) + " s < 120 s");
  return o;
}

struct PresetRun {
  nlohmann::json report;
  double seconds = 0.0;
  bool same_bytes = false;
};

// Runs a preset with 1 and 8 threads; the single-threaded run is timed.
PresetRun run_preset(const std::string& name) {
  PresetRun r;
  const fs::path one = workdir(name + "_t1"), eight = workdir(name + "_t8");
  const auto t0 = std::chrono::steady_clock::now();
  r.report = cli::cmd_optimize(preset_config(name, one, 1)).report;
  r.seconds = seconds_since(t0);
  cli::cmd_optimize(preset_config(name, eight, 8));
  r.same_bytes = slurp(one / "report.json") == slurp(eight / "report.json");
  return r;
}

std::vector<double> fidelities(const nlohmann::json& report) {
  std::vector<double> f;
  for (const auto& s : report.at("steps")) f.push_back(s.at("fidelity").get<double>());
  return f;
}

Outcome plain_reproduction(const PresetRun& run) {
  Outcome o;
  const std::vector<double> f = fidelities(run.report);
  o.check(!run.report.contains("error"), "run completed");
  o.check(f.size() == 21, std::to_string(f.size()) + " fidelity records");
  o.check(std::abs(f.front() - 0.9821) <= 0.0005, "start " + num(f.front(), 8) + " vs 0.9821 +- 0.0005");
  o.check(std::abs(f.back() - 0.9839) <= 0.001, "end " + num(f.back(), 8) + " vs 0.9839 +- 0.001");
  bool up = false, down = false;
  for (std::size_t i = 1; i < f.size(); ++i) {
    up = up || f[i] > f[i - 1];
    down = down || f[i] < f[i - 1];
  }
  o.check(up && down, std::string("non-monotone trajectory (increase ") + (up ? "yes" : "no") +
                          ", decrease " + (down ? "yes" : "no") + ", total change " +
                          num(f.back() - f.front(), 3) + ")");
  o.note("first gradient norm " + num(run.report.at("steps")[0].at("grad_norm").get<double>()));
  o.check(run.seconds < 600.0, "runtime " + num(run.seconds, 3) + " s < 600 s");
  return o;
}

Outcome stabilized_reproduction(const PresetRun& run) {
  Outcome o;
  const std::vector<double> f = fidelities(run.report);
  o.check(!run.report.contains("error"), "run completed");
  o.check(std::abs(f.front() - 0.783) <= 0.005, "start " + num(f.front(), 8) + " vs 0.783 +- 0.005");
  o.check(f.size() == 101 && f.back() >= 0.90, "step 100 fidelity " + num(f.back(), 8) + " >= 0.90");
  double ortho = 0.0, norm = 0.0;
  for (const auto& s : run.report.at("steps")) {
    ortho = std::max(ortho, s.at("max_ortho").get<double>());
    norm = std::max(norm, s.at("max_norm_dev").get<double>());
  }
  o.check(ortho < 0.05 && norm < 0.05,
          "max residuals ortho " + num(ortho, 3) + ", norm " + num(norm, 3) + " < 0.05");
  o.check(run.seconds < 1800.0, "runtime " + num(run.seconds, 3) + " s < 1800 s");
  o.check(run.same_bytes, "1 and 8 threads give byte-identical report.json");
  return o;
}

Outcome appendix_fixture() {
  Outcome o;
  cli::RunConfig cfg = preset_config("fig3", workdir("appendix"), 1);
  cfg.doc["code"] = "five_qubit_optimized";
  const cli::CommandResult r = cli::cmd_eval(cfg);
  const double f = r.report.at("fidelity").get<double>();
  o.check(std::abs(f - 0.915) <= 0.005, "fidelity " + num(f, 8) + " vs 0.915 +- 0.005");
  std::vector<double> words;
  for (const auto& v : r.report.at("codeword_fidelities")) words.push_back(v.get<double>());
  o.note("codeword fidelities " + list(words) + ", entanglement " +
         num(r.report.at("entanglement_fidelity").get<double>(), 8));
  std::vector<double> norms;
  for (const auto& v : r.report.at("codeword_norms")) norms.push_back(v.get<double>());
  o.note("codeword norms " + list(norms) + ", max |<0|1>| " + num(r.report.at("max_ortho").get<double>(), 3));
  cfg.doc["raw_fidelity"] = false;
  const double fn = cli::cmd_eval(cfg).report.at("fidelity").get<double>();
  o.note("with normalized codewords the fidelity is " + num(fn, 8));
  return o;
}

Outcome numerical_kernels() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  testkit::SeededGenerator gen(101);
  double worst = 0.0;
  worst = std::max(worst, identity_channel(32).completeness_error());
  worst = std::max(worst, pauli_channel_1q(gen.pauli_params(0.3)).completeness_error());
  worst = std::max(worst, amplitude_damping_1q(0.37).completeness_error());
  const QuantumChannel big = lift_iid(pauli_channel_1q(PauliParams::isotropic(0.05)), 5);
  worst = std::max(worst, big.completeness_error());
  worst = std::max(worst, lift_iid(amplitude_damping_1q(0.2), 5).completeness_error());
  worst = std::max(worst, petz(big, code_state(standard_code(StandardCode::FiveQubit))).channel
                              .completeness_error());
  o.check(big.size() == 1024, "5-qubit Pauli lift has " + std::to_string(big.size()) + " operators");
  o.check(worst <= 1e-10, "completeness error " + num(worst, 3) + " <= 1e-10");

  double gs = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Code q = gram_schmidt(gen.code(3, 4));
    gs = std::max({gs, max_ortho_residual(q), max_norm_deviation(q)});
  }
  o.check(gs <= 1e-12, "Gram-Schmidt residual " + num(gs, 3) + " <= 1e-12");

  double rec = 0.0;
  for (int t = 0; t < 10; ++t) {
    const ComplexMatrix a = gen.psd(8, t % 2 ? 8 : 3);
    const ComplexMatrix s = psd_sqrt(a);
    rec = std::max(rec, (s * s - a).norm());
    const ComplexMatrix pi = psd_pinv_sqrt(a);
    rec = std::max(rec, (s * pi * pi * s * a - a).norm());
  }
  o.check(rec <= 1e-8, "psd_sqrt / psd_pinv_sqrt reconstruction " + num(rec, 3) + " <= 1e-8");

  const Code five = standard_code(StandardCode::FiveQubit);
  for (double p : {1e-3, 1e-4}) {
    const QuantumChannel noise = testkit::single_error_channel(5, p);
    const QuantumChannel r = petz(noise, code_state(five)).channel;
    const double f = fidelity(five, noise, r, FidelitySpec::entanglement());
    o.check(f >= 1.0 - 10.0 * p * p, "p=" + num(p) + " single-error Petz infidelity " + num(1.0 - f, 3) +
                                          " <= " + num(10.0 * p * p, 3));
  }
  const double secs = seconds_since(t0);
  o.check(secs < 60.0, "runtime " + num(secs, 3) + " s < 60 s");
  return o;
}

Outcome gradient_oracles() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  testkit::SeededGenerator gen(103);
  const double delta = 1e-5;
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Code code = gen.code(2, 2);
    const LossParams params{gen.uniform(0.5, 3.0), gen.uniform(0.5, 3.0)};
    const GradientRecord exact = penalty_gradient(code, params);
    const RealVector oracle = testkit::fd_oracle(
        [&](const RealVector& v) { return penalty(testkit::code_from_real(v, 2, 4), params); },
        testkit::code_to_real(code), delta);
    const auto n = static_cast<Eigen::Index>(code.coefficient_count());
    for (Eigen::Index c = 0; c < n; ++c) {
      worst = std::max({worst, std::abs(exact.coefficients[c].dx - oracle[c]),
                        std::abs(exact.coefficients[c].dy - oracle[n + c])});
    }
  }
  o.check(worst < 50 * delta, "EXACT vs central oracle max error " + num(worst, 3) + " < " + num(50 * delta));

  // beta = 1, codeword (2, 0.5i): xi = 1 - ||i|| and the printed form -4 beta xi x_p.
  ComplexMatrix a(2, 1);
  a << 2.0, Complex(0.0, 0.5);
  const Code hand(a);
  const double xi = 1.0 - std::sqrt(4.25);
  const GradientRecord lit = penalty_gradient(hand, {0.0, 1.0}, PenaltyGradientMode::PaperLiteral);
  o.check(lit.at(0, 0).dx == -4.0 * xi * 2.0 && lit.at(0, 1).dy == -4.0 * xi * 0.5 &&
              lit.at(0, 0).dy == 0.0 && lit.at(0, 1).dx == 0.0,
          "PAPER_LITERAL equals -4 beta xi x_p on hand input");
  const GradientRecord ex = penalty_gradient(hand, {0.0, 1.0}, PenaltyGradientMode::Exact);
  o.check(std::abs(ex.at(0, 0).dx - lit.at(0, 0).dx) > 1e-3,
          "EXACT " + num(ex.at(0, 0).dx) + " differs from PAPER_LITERAL " + num(lit.at(0, 0).dx) +
              " off the unit sphere");
  const GradientRecord ue = penalty_gradient(standard_code(StandardCode::Zzz), {1.0, 1.0});
  const GradientRecord ul =
      penalty_gradient(standard_code(StandardCode::Zzz), {1.0, 1.0}, PenaltyGradientMode::PaperLiteral);
  o.check(ue.norm == 0.0 && ul.norm == 0.0, "both modes vanish on orthonormal codes");
  const double secs = seconds_since(t0);
  o.check(secs < 30.0, "runtime " + num(secs, 3) + " s < 30 s");
  return o;
}

Outcome determinism(const PresetRun& sec4, const PresetRun& fig3) {
  Outcome o;
  o.check(sec4.same_bytes, "sec4 report.json identical for --threads 1 and 8");
  o.check(fig3.same_bytes, "fig3 report.json identical for --threads 1 and 8");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> chosen;
  for (int i = 1; i < argc; ++i) chosen.insert(std::atoi(argv[i]));
  auto wanted = [&](int n) { return chosen.empty() || chosen.count(n) > 0; };

  const char* titles[] = {"",
                          "symmetry suite",
                          "calibration target 0.917",
                          "unidirectional invariance",
                          "plain descent reproduction",
                          "stabilized descent reproduction",
                          "appendix code fidelity",
                          "numerical kernels",
                          "gradient oracles",
                          "determinism across threads"};
  int failed = 0;
  auto report = [&](int n, const std::function<Outcome()>& body) {
    if (!wanted(n)) return;
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", n, titles[n]);
    for (const std::string& line : o.notes) std::printf("    %s\n", line.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  };

  report(1, symmetry_suite);
  report(2, calibration_target);
  report(3, unidirectional_invariance);
  std::optional<PresetRun> sec4, fig3;
  auto get = [](std::optional<PresetRun>& slot, const char* name) -> const PresetRun& {
    if (!slot) slot = run_preset(name);
    return *slot;
  };
  report(4, [&] { return plain_reproduction(get(sec4, "sec4")); });
  report(5, [&] { return stabilized_reproduction(get(fig3, "fig3")); });
  report(6, appendix_fixture);
  report(7, numerical_kernels);
  report(8, gradient_oracles);
  report(9, [&] { return determinism(get(sec4, "sec4"), get(fig3, "fig3")); });
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
