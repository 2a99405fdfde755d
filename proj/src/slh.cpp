#include "qfn/slh.hpp"

#include "qfn/errors.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace qfn {

namespace {

std::string shape(const ComplexMatrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

bool labels_collide(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    const std::set<std::string> seen(a.begin(), a.end());
    for (const auto& label : b) {
        if (seen.contains(label)) return true;
    }
    return false;
}

}  // namespace

std::vector<std::string> default_labels(std::size_t count) {
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(std::to_string(i));
    return out;
}

LinearComponent::LinearComponent() : s_(0, 0), c_(0, 0), omega_(0, 0) {}

LinearComponent::LinearComponent(ComplexMatrix s, ComplexMatrix c, ComplexMatrix omega,
                                 std::vector<std::string> port_labels,
                                 std::vector<std::string> mode_labels)
    : s_(std::move(s)),
      c_(std::move(c)),
      omega_(std::move(omega)),
      port_labels_(std::move(port_labels)),
      mode_labels_(std::move(mode_labels)) {
    if (s_.rows() != s_.cols()) throw DimensionMismatch("S must be square, got " + shape(s_));
    if (omega_.rows() != omega_.cols()) {
        throw DimensionMismatch("Omega must be square, got " + shape(omega_));
    }
    if (c_.rows() != s_.rows() || c_.cols() != omega_.rows()) {
        throw DimensionMismatch("C must be " + std::to_string(s_.rows()) + "x" +
                                std::to_string(omega_.rows()) + ", got " + shape(c_));
    }
    if (!all_finite(s_) || !all_finite(c_) || !all_finite(omega_)) {
        throw NonFiniteEntry("component matrices contain NaN or Inf");
    }
    if (port_labels_.empty()) port_labels_ = default_labels(n_ports());
    if (mode_labels_.empty()) mode_labels_ = default_labels(m_modes());
    if (port_labels_.size() != n_ports()) throw DimensionMismatch("port label count mismatch");
    if (mode_labels_.size() != m_modes()) throw DimensionMismatch("mode label count mismatch");
}

LinearComponent LinearComponent::with_labels(std::vector<std::string> port_labels,
                                             std::vector<std::string> mode_labels) const {
    return LinearComponent(s_, c_, omega_, std::move(port_labels), std::move(mode_labels));
}

LinearComponent LinearComponent::prefixed(std::string_view prefix) const {
    auto ports = port_labels_;
    auto modes = mode_labels_;
    for (auto& p : ports) p = std::string(prefix) + "." + p;
    for (auto& m : modes) m = std::string(prefix) + "." + m;
    return with_labels(std::move(ports), std::move(modes));
}

bool operator==(const LinearComponent& a, const LinearComponent& b) {
    return identical(a.s_, b.s_) && identical(a.c_, b.c_) && identical(a.omega_, b.omega_) &&
           a.port_labels_ == b.port_labels_ && a.mode_labels_ == b.mode_labels_;
}

ComplexMatrix StateSpace::evaluate(Complex s) const {
    const ComplexMatrix resolvent_arg = s * ComplexMatrix::Identity(A.rows(), A.cols()) - A;
    return D + Cc * solve(resolvent_arg, B);
}

bool ValidationReport::mentions(std::string_view text) const {
    for (const auto& issue : issues) {
        if (issue.message.find(text) != std::string::npos) return true;
    }
    return false;
}

ValidationReport validate(const LinearComponent& comp, double tol) {
    ValidationReport report;
    const double s_res = unitarity_residual(comp.S());
    if (s_res > tol) report.issues.push_back({"S not unitary", s_res});
    const double o_res = hermiticity_residual(comp.Omega());
    if (o_res > tol) report.issues.push_back({"Omega not hermitian", o_res});
    return report;
}

ComplexMatrix drift(const LinearComponent& comp) {
    return -0.5 * comp.C().adjoint() * comp.C() - kI * comp.Omega();
}

StateSpace realize(const LinearComponent& comp) {
    return StateSpace{drift(comp), -comp.C().adjoint() * comp.S(), comp.C(), comp.S()};
}

LinearComponent make_cavity(const CavityParams& p) {
    if (!(p.gamma >= 0.0)) throw std::invalid_argument("make_cavity: gamma must be >= 0");
    ComplexMatrix s(1, 1), c(1, 1), omega(1, 1);
    s(0, 0) = std::polar(1.0, p.phi);
    c(0, 0) = std::sqrt(p.gamma);
    omega(0, 0) = p.omega;
    return LinearComponent(std::move(s), std::move(c), std::move(omega));
}

LinearComponent make_static(const ComplexMatrix& s, std::vector<std::string> port_labels) {
    return LinearComponent(s, ComplexMatrix(s.rows(), 0), ComplexMatrix(0, 0),
                           std::move(port_labels), {});
}

LinearComponent concatenate(const LinearComponent& a, const LinearComponent& b,
                            std::string_view a_name, std::string_view b_name) {
    LinearComponent lhs = a;
    LinearComponent rhs = b;
    if (labels_collide(a.port_labels(), b.port_labels()) ||
        labels_collide(a.mode_labels(), b.mode_labels())) {
        lhs = a.prefixed(a_name);
        rhs = b.prefixed(b_name);
    }
    auto ports = lhs.port_labels();
    ports.insert(ports.end(), rhs.port_labels().begin(), rhs.port_labels().end());
    auto modes = lhs.mode_labels();
    modes.insert(modes.end(), rhs.mode_labels().begin(), rhs.mode_labels().end());
    return LinearComponent(block_diag(a.S(), b.S()), block_diag(a.C(), b.C()),
                           block_diag(a.Omega(), b.Omega()), std::move(ports), std::move(modes));
}

}  // namespace qfn
