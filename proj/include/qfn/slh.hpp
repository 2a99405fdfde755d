// slh.hpp: linear open quantum components described by (S, C, Omega).
//
// A component with n field ports and m oscillator modes has coupling
// operators L = C a and Hamiltonian H = a' Omega a; neither L nor H is ever
// represented as an operator, only through these matrices.

#pragma once

#include "qfn/matkit.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace qfn {

class LinearComponent {
public:
    // Empty component: no ports, no modes.
    LinearComponent();

    // Throws DimensionMismatch on inconsistent shapes or label counts and
    // NonFiniteEntry on NaN/Inf. Unitarity and hermiticity are *not*
    // enforced here; see validate().
    LinearComponent(ComplexMatrix s, ComplexMatrix c, ComplexMatrix omega,
                    std::vector<std::string> port_labels = {},
                    std::vector<std::string> mode_labels = {});

    std::size_t n_ports() const { return static_cast<std::size_t>(s_.rows()); }
    std::size_t m_modes() const { return static_cast<std::size_t>(omega_.rows()); }

    const ComplexMatrix& S() const { return s_; }
    const ComplexMatrix& C() const { return c_; }
    const ComplexMatrix& Omega() const { return omega_; }
    const std::vector<std::string>& port_labels() const { return port_labels_; }
    const std::vector<std::string>& mode_labels() const { return mode_labels_; }

    LinearComponent with_labels(std::vector<std::string> port_labels,
                                std::vector<std::string> mode_labels) const;
    // Prefixes every port and mode label with "<prefix>.".
    LinearComponent prefixed(std::string_view prefix) const;

    friend bool operator==(const LinearComponent& a, const LinearComponent& b);

private:
    ComplexMatrix s_;
    ComplexMatrix c_;
    ComplexMatrix omega_;
    std::vector<std::string> port_labels_;
    std::vector<std::string> mode_labels_;
};

// Realization (A, B, Cc, D) with transfer convention D + Cc (s - A)^{-1} B.
struct StateSpace {
    ComplexMatrix A;
    ComplexMatrix B;
    ComplexMatrix Cc;
    ComplexMatrix D;

    ComplexMatrix evaluate(Complex s) const;
};

struct CavityParams {
    double gamma = 0.0;  // decay rate, >= 0
    double omega = 0.0;  // detuning
    double phi = 0.0;    // output phase
};

struct ValidationIssue {
    std::string message;
    double residual = 0.0;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;

    bool ok() const { return issues.empty(); }
    bool mentions(std::string_view text) const;
};

ValidationReport validate(const LinearComponent& comp, double tol = kStructuralTol);

// -C'C/2 - i Omega
ComplexMatrix drift(const LinearComponent& comp);

StateSpace realize(const LinearComponent& comp);

LinearComponent make_cavity(const CavityParams& p);

// n-port component with no modes and the given (unitary) scattering matrix.
LinearComponent make_static(const ComplexMatrix& s, std::vector<std::string> port_labels = {});

// Block-diagonal union; ports and modes of a come first. If any port or
// mode label collides, all labels of each side are prefixed with its name.
LinearComponent concatenate(const LinearComponent& a, const LinearComponent& b,
                            std::string_view a_name = "a", std::string_view b_name = "b");

std::vector<std::string> default_labels(std::size_t count);

}  // namespace qfn
