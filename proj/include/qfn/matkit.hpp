// matkit.hpp: dense complex-matrix kernel shared by every module.
//
// All tolerances are absolute and measured in the max-entry norm; the model
// matrices are O(1)-normalized physical parameters.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace qfn {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kStructuralTol = 1e-9;
inline constexpr double kSolveTol = 1e-10;
inline constexpr double kPivotTol = 1e-12;
inline constexpr double kEigenMergeGap = 1e-9;

inline constexpr Complex kI{0.0, 1.0};

ComplexMatrix identity(std::size_t n);
ComplexMatrix zeros(std::size_t rows, std::size_t cols);

ComplexMatrix adjoint(const ComplexMatrix& m);

// Max-entry norm; 0 for an empty matrix.
double max_abs(const ComplexMatrix& m);

bool all_finite(const ComplexMatrix& m);

// Exact equality of shape and entries.
bool identical(const ComplexMatrix& a, const ComplexMatrix& b);

// Solves M X = RHS by partial-pivot LU. Throws SingularMatrix when a pivot
// falls below kPivotTol times the largest column norm of M.
ComplexMatrix solve(const ComplexMatrix& m, const ComplexMatrix& rhs);

struct HermitianSpectrum {
    std::vector<double> eigenvalues;          // ascending, clustered
    std::vector<ComplexMatrix> projectors;    // one per eigenvalue
};

// Spectral decomposition M = sum_k lambda_k P_k. Eigenvalues whose gap is
// within kEigenMergeGap * max(1, max|lambda|) share one projector.
HermitianSpectrum eig_hermitian(const ComplexMatrix& m, double tol = kStructuralTol);

// f(M) for hermitian M via its spectral projectors.
ComplexMatrix hermitian_function(const ComplexMatrix& m, const std::function<Complex(double)>& f);

bool is_unitary(const ComplexMatrix& m, double tol = kStructuralTol);
bool is_hermitian(const ComplexMatrix& m, double tol = kStructuralTol);

// max(|M'M - I|, |MM' - I|)
double unitarity_residual(const ComplexMatrix& m);
double hermiticity_residual(const ComplexMatrix& m);

// (M - M')/(2i): the hermitian matrix reproducing Im<a, M a>.
ComplexMatrix im_part(const ComplexMatrix& m);
// (M + M')/2
ComplexMatrix re_part(const ComplexMatrix& m);

ComplexMatrix block_diag(const ComplexMatrix& a, const ComplexMatrix& b);

// Submatrix picking the listed rows and columns in the listed order.
ComplexMatrix select(const ComplexMatrix& m, std::span<const std::size_t> rows,
                     std::span<const std::size_t> cols);
ComplexMatrix select_rows(const ComplexMatrix& m, std::span<const std::size_t> rows);

double spectral_radius(const ComplexMatrix& m);

}  // namespace qfn
