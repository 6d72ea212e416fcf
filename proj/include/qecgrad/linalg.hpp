#pragma once

// Dense complex matrix kernel. Storage is Eigen; the free functions here
// add the checks and spectral conventions the rest of the library relies on.

#include <complex>
#include <cstddef>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

namespace qecgrad {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kRelativeSpectralCutoff = 1e-12;
inline constexpr std::size_t kDefaultMaxDimension = std::size_t{1} << 10;

/// Largest matrix side any constructor in the library will produce.
std::size_t max_dimension() noexcept;
void set_max_dimension(std::size_t dim);

struct HermitianEigenResult {
  RealVector eigenvalues;     // ascending
  ComplexMatrix eigenvectors; // columns, unitary
};

bool all_finite(const ComplexMatrix& m) noexcept;

/// max |m - m^dagger| entry. Zero for exactly Hermitian input.
double hermiticity_error(const ComplexMatrix& m);

ComplexMatrix identity(std::size_t dim);

/// Single-qubit Pauli by letter: 'I', 'X', 'Y' or 'Z'.
ComplexMatrix pauli(char name);

/// Tensor product of Pauli letters, leftmost letter on the most significant qubit.
ComplexMatrix pauli_string(std::string_view letters);

/// Kronecker product; throws DimensionError past max_dimension().
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized as
/// (m + m^dagger) / 2 after the tolerance check, so round-off asymmetry is fine.
HermitianEigenResult hermitian_eig(const ComplexMatrix& m,
                                   double tolerance = kHermitianTolerance);

/// Resolved cutoff: the explicit value, or kRelativeSpectralCutoff * max |lambda|.
double spectral_cutoff(const RealVector& eigenvalues, std::optional<double> cutoff);

/// V diag(sqrt(max(lambda, 0))) V^dagger. Eigenvalues below -cutoff are an error.
ComplexMatrix psd_sqrt(const ComplexMatrix& m, std::optional<double> cutoff = std::nullopt);

/// V diag(g(lambda)) V^dagger with g = 1/sqrt(lambda) above the cutoff and 0
/// otherwise: the inverse square root on the support of m.
ComplexMatrix psd_pinv_sqrt(const ComplexMatrix& m, std::optional<double> cutoff = std::nullopt);

/// Number of eigenvalues above the cutoff.
std::size_t psd_rank(const ComplexMatrix& m, std::optional<double> cutoff = std::nullopt);

/// Frobenius norm of (a - b) divided by the Frobenius norm of b (or 1 if b = 0).
double relative_frobenius_error(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace qecgrad
