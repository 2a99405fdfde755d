#include "qfn/stratcal.hpp"

#include "qfn/errors.hpp"

#include <cmath>

namespace qfn {

namespace {

void require_shapes(const StratonovichModel& sm) {
    if (sm.E.rows() != sm.E.cols() || sm.K.rows() != sm.K.cols() || sm.F.rows() != sm.E.rows() ||
        sm.F.cols() != sm.K.rows()) {
        throw DimensionMismatch("Stratonovich model needs E n x n, F n x m, K m x m");
    }
}

}  // namespace

LinearComponent strat_to_ito(const StratonovichModel& sm) {
    require_shapes(sm);
    if (!is_hermitian(sm.E)) throw NotHermitian("E is not hermitian");
    if (!is_hermitian(sm.K)) throw NotHermitian("K is not hermitian");
    const std::size_t n = static_cast<std::size_t>(sm.E.rows());
    const ComplexMatrix half = 0.5 * kI * sm.E;
    const ComplexMatrix plus = identity(n) + half;

    ComplexMatrix rhs(plus.rows(), plus.cols() + sm.F.cols());
    rhs << identity(n), sm.F;
    const ComplexMatrix resolved = solve(plus, rhs);
    ComplexMatrix s = (identity(n) - half) * resolved.leftCols(plus.cols());
    ComplexMatrix c = -kI * resolved.rightCols(sm.F.cols());
    ComplexMatrix omega = sm.K + re_part(0.5 * sm.F.adjoint() * c);
    return LinearComponent(std::move(s), std::move(c), std::move(omega));
}

StratonovichModel ito_to_strat(const LinearComponent& comp) {
    const std::size_t n = comp.n_ports();
    const ComplexMatrix& s = comp.S();
    StratonovichModel sm;
    // S is unitary, so |S + I| <= 2 fixes the scale: an absolute test on the
    // smallest singular value catches eigenvalues within rounding of -1.
    const ComplexMatrix shifted = s + identity(n);
    if (n > 0 && Eigen::JacobiSVD<ComplexMatrix>(shifted).singularValues().minCoeff() < 2.0 * kPivotTol) {
        throw CayleySingular("S has eigenvalue -1; no finite scattering generator exists");
    }
    // E = 2i (S + I)^{-1}(S - I); both factors are functions of S and commute.
    try {
        sm.E = 2.0 * kI * solve(shifted, s - identity(n));
    } catch (const SingularMatrix&) {
        throw CayleySingular("S has eigenvalue -1; no finite scattering generator exists");
    }
    sm.E = re_part(sm.E);
    sm.F = kI * (identity(n) + 0.5 * kI * sm.E) * comp.C();
    sm.K = comp.Omega() - re_part(0.5 * sm.F.adjoint() * comp.C());
    return sm;
}

ItoTableResiduals ito_table_residuals(const StratonovichModel& sm, const LinearComponent& comp) {
    require_shapes(sm);
    if (sm.E.rows() != comp.S().rows() || sm.K.rows() != comp.Omega().rows()) {
        throw DimensionMismatch("Stratonovich model and component dimensions differ");
    }
    const std::size_t n = comp.n_ports();
    const ComplexMatrix s_minus = comp.S() - identity(n);
    const ComplexMatrix& c = comp.C();
    ItoTableResiduals r;
    r.scattering = max_abs(s_minus + kI * sm.E + 0.5 * kI * sm.E * s_minus);
    r.coupling = max_abs(c + kI * sm.F + 0.5 * kI * sm.E * c);
    r.damping = max_abs(drift(comp) - (-kI * sm.K - 0.5 * kI * sm.F.adjoint() * c));
    return r;
}

ComplexMatrix scattering_from_generator(const ComplexMatrix& e) {
    return hermitian_function(e, [](double lambda) {
        return std::exp(Complex(0.0, -2.0 * std::atan(lambda / 2.0)));
    });
}

}  // namespace qfn
