#include "qecgrad/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "qecgrad/error.hpp"

namespace qecgrad {

namespace {

std::atomic<std::size_t> g_max_dimension{kDefaultMaxDimension};

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": matrix is " + std::to_string(m.rows()) +
                         "x" + std::to_string(m.cols()) + ", expected square");
  }
}

// Applies g to the spectrum of a Hermitian matrix after the PSD check shared by
// psd_sqrt and psd_pinv_sqrt.
template <typename F>
ComplexMatrix psd_function(const ComplexMatrix& m, std::optional<double> cutoff, F g,
                           const char* what) {
  const HermitianEigenResult eig = hermitian_eig(m);
  const double cut = spectral_cutoff(eig.eigenvalues, cutoff);
  const Eigen::Index n = eig.eigenvalues.size();
  RealVector mapped(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double lambda = eig.eigenvalues(i);
    if (lambda < -cut) {
      throw NumericalError(std::string(what) + ": eigenvalue " + std::to_string(lambda) +
                           " below -cutoff " + std::to_string(-cut) + " (input not PSD)");
    }
    mapped(i) = g(std::max(lambda, 0.0), cut);
  }
  return eig.eigenvectors * mapped.asDiagonal() * eig.eigenvectors.adjoint();
}

}  // namespace

std::size_t max_dimension() noexcept { return g_max_dimension.load(); }

void set_max_dimension(std::size_t dim) {
  if (dim < 1) throw InvalidArgument("max dimension must be positive");
  g_max_dimension.store(dim);
}

bool all_finite(const ComplexMatrix& m) noexcept {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
    }
  }
  return true;
}

double hermiticity_error(const ComplexMatrix& m) {
  require_square(m, "hermiticity_error");
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

ComplexMatrix identity(std::size_t dim) {
  if (dim > max_dimension()) {
    throw DimensionError("identity: dimension " + std::to_string(dim) + " exceeds maximum " +
                         std::to_string(max_dimension()));
  }
  const auto n = static_cast<Eigen::Index>(dim);
  return ComplexMatrix::Identity(n, n);
}

ComplexMatrix pauli(char name) {
  ComplexMatrix p = ComplexMatrix::Zero(2, 2);
  switch (name) {
    case 'I':
      p(0, 0) = 1.0;
      p(1, 1) = 1.0;
      break;
    case 'X':
      p(0, 1) = 1.0;
      p(1, 0) = 1.0;
      break;
    case 'Y':
      p(0, 1) = Complex(0.0, -1.0);
      p(1, 0) = Complex(0.0, 1.0);
      break;
    case 'Z':
      p(0, 0) = 1.0;
      p(1, 1) = -1.0;
      break;
    default:
      throw InvalidArgument(std::string("unknown Pauli '") + name + "'");
  }
  return p;
}

ComplexMatrix pauli_string(std::string_view letters) {
  if (letters.empty()) throw InvalidArgument("empty Pauli string");
  ComplexMatrix out = pauli(letters.front());
  for (std::size_t i = 1; i < letters.size(); ++i) out = kron(out, pauli(letters[i]));
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const auto rows = static_cast<std::size_t>(a.rows()) * static_cast<std::size_t>(b.rows());
  const auto cols = static_cast<std::size_t>(a.cols()) * static_cast<std::size_t>(b.cols());
  if (rows > max_dimension() || cols > max_dimension()) {
    throw DimensionError("kron: result " + std::to_string(rows) + "x" + std::to_string(cols) +
                         " exceeds maximum dimension " + std::to_string(max_dimension()));
  }
  ComplexMatrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

HermitianEigenResult hermitian_eig(const ComplexMatrix& m, double tolerance) {
  require_square(m, "hermitian_eig");
  if (!all_finite(m)) throw NumericalError("hermitian_eig: non-finite entries");
  const double scale = m.size() == 0 ? 1.0 : std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = hermiticity_error(m);
  if (asym > tolerance * scale) {
    throw NumericalError("hermitian_eig: matrix not Hermitian (max |m - m^dagger| = " +
                         std::to_string(asym) + ")");
  }
  const ComplexMatrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("hermitian_eig: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double spectral_cutoff(const RealVector& eigenvalues, std::optional<double> cutoff) {
  if (cutoff) {
    if (!(*cutoff >= 0.0)) throw InvalidArgument("spectral cutoff must be non-negative");
    return *cutoff;
  }
  if (eigenvalues.size() == 0) return 0.0;
  return kRelativeSpectralCutoff * eigenvalues.cwiseAbs().maxCoeff();
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m, std::optional<double> cutoff) {
  return psd_function(
      m, cutoff, [](double lambda, double) { return std::sqrt(lambda); }, "psd_sqrt");
}

ComplexMatrix psd_pinv_sqrt(const ComplexMatrix& m, std::optional<double> cutoff) {
  return psd_function(
      m, cutoff,
      [](double lambda, double cut) { return lambda > cut ? 1.0 / std::sqrt(lambda) : 0.0; },
      "psd_pinv_sqrt");
}

std::size_t psd_rank(const ComplexMatrix& m, std::optional<double> cutoff) {
  const HermitianEigenResult eig = hermitian_eig(m);
  const double cut = spectral_cutoff(eig.eigenvalues, cutoff);
  return static_cast<std::size_t>((eig.eigenvalues.array() > cut).count());
}

double relative_frobenius_error(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("relative_frobenius_error: shape mismatch");
  }
  const double denom = b.norm();
  return (a - b).norm() / (denom > 0.0 ? denom : 1.0);
}

}  // namespace qecgrad
