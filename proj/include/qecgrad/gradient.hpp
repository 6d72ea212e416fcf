#pragma once

// Wirtinger finite-difference gradients over code coefficients a = x + iy.

#include <cstddef>
#include <functional>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "qecgrad/code.hpp"
#include "qecgrad/objective.hpp"

namespace qecgrad {

struct FDConfig {
  enum class Scheme {
    Forward,  // (f(a + h) - f(a)) / delta, 2N + 1 evaluations
    Central,  // (f(a + h) - f(a - h)) / (2 delta), 4N + 1 evaluations
    Central4,  // five-point stencil, exact for quartics, 8N + 1 evaluations
  };

  double delta = 1e-4;
  Scheme scheme = Scheme::Forward;

  void validate() const;
};

FDConfig::Scheme parse_fd_scheme(std::string_view text);
std::string_view to_string(FDConfig::Scheme scheme);

struct CoefficientGradient {
  std::size_t word = 0;
  std::size_t index = 0;
  double dx = 0.0;
  double dy = 0.0;
  double slope = 0.0;  // sqrt(dx^2 + dy^2)
  double angle = 0.0;  // atan2(dy, dx)
};

struct GradientRecord {
  std::vector<CoefficientGradient> coefficients;  // word-major
  std::size_t words = 0;
  std::size_t word_dimension = 0;
  double norm = 0.0;
  double delta = 0.0;
  double objective_at_base = 0.0;

  /// Fills slope, angle and norm from the dx/dy components.
  static GradientRecord from_components(std::size_t words, std::size_t word_dimension,
                                        const std::vector<double>& dx,
                                        const std::vector<double>& dy, double delta,
                                        double objective_at_base);

  const CoefficientGradient& at(std::size_t word, std::size_t index) const {
    return coefficients[word * word_dimension + index];
  }
  /// Gradient norm restricted to one codeword's coefficients.
  double word_norm(std::size_t word) const;
  /// The update direction dx + i dy as a d x K matrix.
  ComplexMatrix as_matrix() const;
};

/// Component-wise sum; shapes must match. The result's base value and delta
/// are taken from `a`.
GradientRecord add(const GradientRecord& a, const GradientRecord& b);

using Objective = std::function<double(const Code&)>;

/// Throws NumericalError naming the coefficient and direction when the
/// objective is non-finite. `threads` = 0 uses every hardware thread; the
/// record is identical for any thread count.
GradientRecord fd_gradient(const Objective& objective, const Code& code, const FDConfig& cfg,
                           std::size_t threads = 1);

/// |(dx + i dy) / 2| per coefficient, i.e. |df/dz-bar|.
std::vector<double> nonanalyticity_check(const GradientRecord& record);

enum class PenaltyGradientMode { Exact, PaperLiteral };

/// Analytic gradient of alpha sum_{i<j} |<i|j>|^2 + beta sum_i (1 - ||i||)^2.
/// Exact: norm part -2 beta xi x_p / ||i||. PaperLiteral: -4 beta xi x_p.
/// Orthogonality part from dK/dx = 2fu - 2gv, dK/dy = 2fv + 2gu,
/// dK/du = 2fx + 2gy, dK/dv = 2fy - 2gx with (f, g) = inner_product_parts.
GradientRecord penalty_gradient(const Code& code, const LossParams& params,
                                PenaltyGradientMode mode = PenaltyGradientMode::Exact);

nlohmann::json gradient_to_json(const GradientRecord& record);

}  // namespace qecgrad
