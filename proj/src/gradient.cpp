#include "qecgrad/gradient.hpp"

#include <cmath>
#include <string>

#include "qecgrad/error.hpp"
#include "qecgrad/parallel.hpp"

namespace qecgrad {

void FDConfig::validate() const {
  if (!(std::isfinite(delta) && delta > 0.0)) {
    throw InvalidArgument("finite-difference delta must be finite and positive");
  }
}

FDConfig::Scheme parse_fd_scheme(std::string_view text) {
  if (text == "forward") return FDConfig::Scheme::Forward;
  if (text == "central") return FDConfig::Scheme::Central;
  if (text == "central4") return FDConfig::Scheme::Central4;
  throw FormatError("unknown finite-difference scheme '" + std::string(text) + "'");
}

std::string_view to_string(FDConfig::Scheme scheme) {
  switch (scheme) {
    case FDConfig::Scheme::Forward:
      return "forward";
    case FDConfig::Scheme::Central:
      return "central";
    case FDConfig::Scheme::Central4:
      break;
  }
  return "central4";
}

GradientRecord GradientRecord::from_components(std::size_t words, std::size_t word_dimension,
                                               const std::vector<double>& dx,
                                               const std::vector<double>& dy, double delta,
                                               double objective_at_base) {
  const std::size_t n = words * word_dimension;
  if (dx.size() != n || dy.size() != n) throw DimensionError("gradient component count mismatch");
  GradientRecord rec;
  rec.words = words;
  rec.word_dimension = word_dimension;
  rec.delta = delta;
  rec.objective_at_base = objective_at_base;
  rec.coefficients.resize(n);
  double sum = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    CoefficientGradient& g = rec.coefficients[c];
    g.word = c / word_dimension;
    g.index = c % word_dimension;
    g.dx = dx[c];
    g.dy = dy[c];
    g.slope = std::sqrt(g.dx * g.dx + g.dy * g.dy);
    g.angle = std::atan2(g.dy, g.dx);
    sum += g.slope * g.slope;
  }
  rec.norm = std::sqrt(sum);
  return rec;
}

double GradientRecord::word_norm(std::size_t word) const {
  if (word >= words) throw InvalidArgument("word index out of range");
  double sum = 0.0;
  for (std::size_t i = 0; i < word_dimension; ++i) {
    const double s = at(word, i).slope;
    sum += s * s;
  }
  return std::sqrt(sum);
}

ComplexMatrix GradientRecord::as_matrix() const {
  ComplexMatrix m(static_cast<Eigen::Index>(word_dimension), static_cast<Eigen::Index>(words));
  for (const CoefficientGradient& g : coefficients) {
    m(static_cast<Eigen::Index>(g.index), static_cast<Eigen::Index>(g.word)) = Complex(g.dx, g.dy);
  }
  return m;
}

GradientRecord add(const GradientRecord& a, const GradientRecord& b) {
  if (a.words != b.words || a.word_dimension != b.word_dimension) {
    throw DimensionError("cannot add gradient records of different shape");
  }
  std::vector<double> dx(a.coefficients.size()), dy(a.coefficients.size());
  for (std::size_t c = 0; c < dx.size(); ++c) {
    dx[c] = a.coefficients[c].dx + b.coefficients[c].dx;
    dy[c] = a.coefficients[c].dy + b.coefficients[c].dy;
  }
  return GradientRecord::from_components(a.words, a.word_dimension, dx, dy, a.delta,
                                         a.objective_at_base);
}

GradientRecord fd_gradient(const Objective& objective, const Code& code, const FDConfig& cfg,
                           std::size_t threads) {
  cfg.validate();
  const double base = objective(code);
  if (!std::isfinite(base)) throw NumericalError("objective is non-finite at the base point");

  const std::size_t n = code.coefficient_count();
  const std::size_t dim = code.dimension();
  // Evaluation e: coefficient e / slots, direction e % slots, in the order
  // +d, +id, -d, -id, +2d, +2id, -2d, -2id.
  const std::size_t slots = cfg.scheme == FDConfig::Scheme::Forward   ? 2
                            : cfg.scheme == FDConfig::Scheme::Central ? 4
                                                                      : 8;
  const double d = cfg.delta;
  const Complex steps[8] = {{d, 0.0},  {0.0, d},  {-d, 0.0},  {0.0, -d},
                            {2 * d, 0.0}, {0.0, 2 * d}, {-2 * d, 0.0}, {0.0, -2 * d}};
  static const char* const names[8] = {"+delta",   "+i*delta",   "-delta",   "-i*delta",
                                       "+2*delta", "+2i*delta", "-2*delta", "-2i*delta"};

  std::vector<double> values(n * slots);
  parallel_for(values.size(), threads, [&](std::size_t e) {
    const std::size_t c = e / slots;
    const std::size_t s = e % slots;
    const double v = objective(code.shifted(c / dim, c % dim, steps[s]));
    if (!std::isfinite(v)) {
      throw NumericalError("objective is non-finite at word " + std::to_string(c / dim) +
                           ", index " + std::to_string(c % dim) + ", step " + names[s]);
    }
    values[e] = v;
  });

  std::vector<double> dx(n), dy(n);
  for (std::size_t c = 0; c < n; ++c) {
    const double* v = &values[c * slots];
    switch (cfg.scheme) {
      case FDConfig::Scheme::Forward:
        dx[c] = (v[0] - base) / d;
        dy[c] = (v[1] - base) / d;
        break;
      case FDConfig::Scheme::Central:
        dx[c] = (v[0] - v[2]) / (2.0 * d);
        dy[c] = (v[1] - v[3]) / (2.0 * d);
        break;
      case FDConfig::Scheme::Central4:
        dx[c] = (8.0 * (v[0] - v[2]) - (v[4] - v[6])) / (12.0 * d);
        dy[c] = (8.0 * (v[1] - v[3]) - (v[5] - v[7])) / (12.0 * d);
        break;
    }
  }
  return GradientRecord::from_components(code.size(), dim, dx, dy, cfg.delta, base);
}

std::vector<double> nonanalyticity_check(const GradientRecord& record) {
  std::vector<double> out;
  out.reserve(record.coefficients.size());
  for (const CoefficientGradient& g : record.coefficients) {
    out.push_back(0.5 * std::hypot(g.dx, g.dy));
  }
  return out;
}

GradientRecord penalty_gradient(const Code& code, const LossParams& params,
                                PenaltyGradientMode mode) {
  params.validate();
  const std::size_t k = code.size();
  const std::size_t dim = code.dimension();
  std::vector<double> dx(k * dim, 0.0), dy(k * dim, 0.0);

  for (std::size_t w = 0; w < k; ++w) {
    const double nrm = code.column(w).norm();
    const double xi = 1.0 - nrm;
    double scale;
    if (mode == PenaltyGradientMode::Exact) {
      if (nrm == 0.0) throw NumericalError("zero-norm codeword in exact penalty gradient");
      scale = -2.0 * params.beta * xi / nrm;
    } else {
      scale = -4.0 * params.beta * xi;
    }
    for (std::size_t p = 0; p < dim; ++p) {
      const Complex a = code.coefficient(w, p);
      dx[w * dim + p] += scale * a.real();
      dy[w * dim + p] += scale * a.imag();
    }
  }

  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const auto [f, g] = inner_product_parts(code.codeword(i), code.codeword(j));
      for (std::size_t p = 0; p < dim; ++p) {
        const Complex a = code.coefficient(i, p);
        const Complex b = code.coefficient(j, p);
        const double x = a.real(), y = a.imag(), u = b.real(), v = b.imag();
        dx[i * dim + p] += params.alpha * (2.0 * f * u - 2.0 * g * v);
        dy[i * dim + p] += params.alpha * (2.0 * f * v + 2.0 * g * u);
        dx[j * dim + p] += params.alpha * (2.0 * f * x + 2.0 * g * y);
        dy[j * dim + p] += params.alpha * (2.0 * f * y - 2.0 * g * x);
      }
    }
  }
  return GradientRecord::from_components(k, dim, dx, dy, 0.0, penalty(code, params));
}

nlohmann::json gradient_to_json(const GradientRecord& record) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (const CoefficientGradient& g : record.coefficients) {
    coeffs.push_back({{"word", g.word},
                      {"index", g.index},
                      {"dx", g.dx},
                      {"dy", g.dy},
                      {"slope", g.slope},
                      {"angle", g.angle}});
  }
  return {{"delta", record.delta}, {"norm", record.norm}, {"coefficients", coeffs}};
}

}  // namespace qecgrad
