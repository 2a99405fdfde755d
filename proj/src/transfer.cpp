#include "qfn/transfer.hpp"

#include "qfn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qfn {

namespace {

double trace_re(const ComplexMatrix& m) { return m.trace().real(); }

bool is_zero_eigenvalue(double value, double largest, double tol) {
    return std::abs(value) <= tol * std::max(1.0, largest);
}

}  // namespace

TransferEvaluation eval_transfer(const LinearComponent& comp, Complex s) {
    const std::size_t m = comp.m_modes();
    const ComplexMatrix shifted = s * identity(m) - drift(comp);

    ComplexMatrix rhs(static_cast<Eigen::Index>(m), comp.S().cols() + static_cast<Eigen::Index>(m));
    rhs << comp.C().adjoint() * comp.S(), identity(m);
    ComplexMatrix resolved;
    try {
        resolved = solve(shifted, rhs);
    } catch (const SingularMatrix&) {
        throw SingularAtS("transfer function has a pole at s = (" + std::to_string(s.real()) + ", " +
                          std::to_string(s.imag()) + ")");
    }
    const Eigen::Index n = comp.S().cols();
    TransferEvaluation out;
    out.s = s;
    out.Xi = comp.S() - comp.C() * resolved.leftCols(n);
    out.xi = comp.C() * resolved.rightCols(static_cast<Eigen::Index>(m));
    return out;
}

std::vector<FrequencyPoint> freq_response(const LinearComponent& comp,
                                          std::span<const double> omegas, double sigma) {
    std::vector<FrequencyPoint> out;
    out.reserve(omegas.size());
    for (double w : omegas) {
        FrequencyPoint point{w, std::nullopt};
        try {
            point.value = eval_transfer(comp, Complex(sigma, w));
        } catch (const SingularAtS&) {
        }
        out.push_back(std::move(point));
    }
    return out;
}

AxisUnitarityReport check_unitary_on_axis(const LinearComponent& comp,
                                          std::span<const double> omegas, double tol,
                                          double sigma) {
    AxisUnitarityReport report;
    report.tol = tol;
    for (const auto& point : freq_response(comp, omegas, sigma)) {
        report.omegas.push_back(point.omega);
        if (!point.value) {
            report.residuals.emplace_back();
            continue;
        }
        const double r = unitarity_residual(point.value->Xi);
        report.residuals.emplace_back(r);
        // NaN residuals must fail
        if (!(r <= tol)) report.pass = false;
        report.max_residual = std::max(report.max_residual, r);
    }
    return report;
}

ComplexMatrix CommutingForm::evaluate(Complex s) const {
    ComplexMatrix out = ComplexMatrix::Zero(S.rows(), S.cols());
    for (std::size_t k = 0; k < gammas.size(); ++k) {
        const Complex num = s - 0.5 * gammas[k] + kI * epsilons[k];
        const Complex den = s + 0.5 * gammas[k] + kI * epsilons[k];
        out += (num / den) * projectors[k];
    }
    return out * S;
}

CommutingForm commuting_form(const LinearComponent& comp, double tol) {
    const ComplexMatrix& c = comp.C();
    const ComplexMatrix& omega = comp.Omega();
    const ComplexMatrix ctc = c.adjoint() * c;

    const double commutator = max_abs(ctc * omega - omega * ctc);
    if (commutator > tol) {
        throw NotCommuting("[C'C, Omega] has max entry " + std::to_string(commutator));
    }

    // Omega must act as a scalar eps(mu) on every coupled eigenspace of C'C.
    // On the kernel it only matters when some port is decoupled too, and
    // then it is eps(0) if Omega is scalar there.
    const HermitianSpectrum modes = eig_hermitian(ctc, tol);
    const double mode_scale =
        modes.eigenvalues.empty() ? 0.0 : std::abs(modes.eigenvalues.back());
    const double omega_scale = std::max(1.0, max_abs(omega));
    std::optional<double> kernel_eps;
    for (std::size_t j = 0; j < modes.eigenvalues.size(); ++j) {
        const ComplexMatrix& p = modes.projectors[j];
        const double eps = trace_re(p * omega) / trace_re(p);
        const bool scalar = max_abs(p * omega * p - eps * p) <= tol * omega_scale;
        if (is_zero_eigenvalue(modes.eigenvalues[j], mode_scale, tol)) {
            if (scalar) kernel_eps = eps;
        } else if (!scalar) {
            throw NotCommuting("Omega is not a function of C'C on a degenerate eigenspace");
        }
    }

    const HermitianSpectrum ports = eig_hermitian(c * c.adjoint(), tol);
    const double port_scale =
        ports.eigenvalues.empty() ? 0.0 : std::abs(ports.eigenvalues.back());
    const ComplexMatrix lifted = c * omega * c.adjoint();

    CommutingForm cf;
    cf.S = comp.S();
    for (std::size_t k = 0; k < ports.eigenvalues.size(); ++k) {
        const ComplexMatrix& e = ports.projectors[k];
        if (is_zero_eigenvalue(ports.eigenvalues[k], port_scale, tol)) {
            if (!kernel_eps) {
                throw ZeroModeAmbiguity(
                    "ports decoupled from every mode (gamma = 0) and no decoupled mode fixes eps(0)");
            }
            cf.gammas.push_back(0.0);
            cf.epsilons.push_back(*kernel_eps);
        } else {
            cf.gammas.push_back(ports.eigenvalues[k]);
            cf.epsilons.push_back(trace_re(e * lifted) / trace_re(e * c * c.adjoint()));
        }
        cf.projectors.push_back(e);
    }
    return cf;
}

PoleZeroSet poles_zeros_commuting(const CommutingForm& cf) {
    PoleZeroSet out;
    for (std::size_t k = 0; k < cf.gammas.size(); ++k) {
        out.poles.emplace_back(-0.5 * cf.gammas[k], -cf.epsilons[k]);
        out.zeros.emplace_back(0.5 * cf.gammas[k], -cf.epsilons[k]);
    }
    return out;
}

}  // namespace qfn
