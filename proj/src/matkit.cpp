#include "qfn/matkit.hpp"

#include "qfn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qfn {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

}  // namespace

ComplexMatrix identity(std::size_t n) { return ComplexMatrix::Identity(idx(n), idx(n)); }

ComplexMatrix zeros(std::size_t rows, std::size_t cols) {
    return ComplexMatrix::Zero(idx(rows), idx(cols));
}

ComplexMatrix adjoint(const ComplexMatrix& m) { return m.adjoint(); }

double max_abs(const ComplexMatrix& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().maxCoeff();
}

bool all_finite(const ComplexMatrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
        }
    }
    return true;
}

bool identical(const ComplexMatrix& a, const ComplexMatrix& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a.size() == 0 || a == b);
}

ComplexMatrix solve(const ComplexMatrix& m, const ComplexMatrix& rhs) {
    if (m.rows() != m.cols()) {
        throw DimensionMismatch("solve: matrix is " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + ", expected square");
    }
    if (rhs.rows() != m.rows()) {
        throw DimensionMismatch("solve: right-hand side has " + std::to_string(rhs.rows()) +
                                " rows, expected " + std::to_string(m.rows()));
    }
    if (m.rows() == 0) return ComplexMatrix(0, rhs.cols());

    const double col_norm = m.colwise().norm().maxCoeff();
    Eigen::PartialPivLU<ComplexMatrix> lu(m);
    const ComplexMatrix& packed = lu.matrixLU();
    for (Eigen::Index k = 0; k < packed.rows(); ++k) {
        // negated comparison so that a zero matrix (col_norm == 0) is singular
        if (!(std::abs(packed(k, k)) > kPivotTol * col_norm)) {
            throw SingularMatrix("solve: rank-deficient matrix (pivot " + std::to_string(k) + ")");
        }
    }
    return lu.solve(rhs);
}

HermitianSpectrum eig_hermitian(const ComplexMatrix& m, double tol) {
    if (m.rows() != m.cols()) throw DimensionMismatch("eig_hermitian: matrix is not square");
    if (!is_hermitian(m, tol)) {
        throw NotHermitian("eig_hermitian: residual " + std::to_string(hermiticity_residual(m)));
    }
    HermitianSpectrum out;
    if (m.rows() == 0) return out;

    const ComplexMatrix sym = re_part(m);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    if (solver.info() != Eigen::Success) throw Error("eig_hermitian: eigensolver did not converge");
    const Eigen::VectorXd& values = solver.eigenvalues();
    const ComplexMatrix& vectors = solver.eigenvectors();

    const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
    Eigen::Index start = 0;
    const Eigen::Index n = values.size();
    while (start < n) {
        Eigen::Index end = start + 1;
        while (end < n && values(end) - values(end - 1) <= kEigenMergeGap * scale) ++end;
        const auto block = vectors.middleCols(start, end - start);
        out.eigenvalues.push_back(values.segment(start, end - start).mean());
        out.projectors.push_back(block * block.adjoint());
        start = end;
    }
    return out;
}

ComplexMatrix hermitian_function(const ComplexMatrix& m, const std::function<Complex(double)>& f) {
    const HermitianSpectrum spec = eig_hermitian(m);
    ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
    for (std::size_t k = 0; k < spec.eigenvalues.size(); ++k) {
        out += f(spec.eigenvalues[k]) * spec.projectors[k];
    }
    return out;
}

double unitarity_residual(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("unitarity_residual: matrix is not square");
    const ComplexMatrix eye = ComplexMatrix::Identity(m.rows(), m.cols());
    return std::max(max_abs(m.adjoint() * m - eye), max_abs(m * m.adjoint() - eye));
}

double hermiticity_residual(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("hermiticity_residual: matrix is not square");
    return max_abs(m - m.adjoint());
}

bool is_unitary(const ComplexMatrix& m, double tol) {
    return m.rows() == m.cols() && unitarity_residual(m) <= tol;
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
    return m.rows() == m.cols() && hermiticity_residual(m) <= tol;
}

ComplexMatrix im_part(const ComplexMatrix& m) {
    return (m - m.adjoint()) / (2.0 * kI);
}

ComplexMatrix re_part(const ComplexMatrix& m) {
    return (m + m.adjoint()) / 2.0;
}

ComplexMatrix block_diag(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out = ComplexMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

ComplexMatrix select(const ComplexMatrix& m, std::span<const std::size_t> rows,
                     std::span<const std::size_t> cols) {
    ComplexMatrix out(idx(rows.size()), idx(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            out(idx(i), idx(j)) = m(idx(rows[i]), idx(cols[j]));
        }
    }
    return out;
}

ComplexMatrix select_rows(const ComplexMatrix& m, std::span<const std::size_t> rows) {
    ComplexMatrix out(idx(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(idx(i)) = m.row(idx(rows[i]));
    return out;
}

double spectral_radius(const ComplexMatrix& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("spectral_radius: matrix is not square");
    if (m.rows() == 0) return 0.0;
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace qfn
