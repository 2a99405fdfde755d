// Independent reference computations used as test oracles.

#pragma once

#include "qfn/network.hpp"
#include "qfn/transfer.hpp"

#include <algorithm>
#include <complex>
#include <string>

namespace qfn::testing {

// Frequency-domain elimination of the internal channels of a partitioned
// component, working only with the open-loop transfer function:
//   Xi_red = Xi_ee + Xi_ei (eta - Xi_ii)^{-1} Xi_ie
// where Xi_ii has rows = internal outputs, columns = internal inputs.
inline ComplexMatrix lft_oracle(const PartitionedComponent& pc, Complex s) {
    const ComplexMatrix xi = eval_transfer(pc.component(), s).Xi;
    const ComplexMatrix xi_ii = select(xi, pc.internal_out(), pc.internal_in());
    const ComplexMatrix xi_ie = select(xi, pc.internal_out(), pc.external_in());
    const ComplexMatrix xi_ei = select(xi, pc.external_out(), pc.internal_in());
    const ComplexMatrix xi_ee = select(xi, pc.external_out(), pc.external_in());
    const ComplexMatrix x = pc.eta() - xi_ii;
    return xi_ee + xi_ei * x.partialPivLu().solve(xi_ie);
}

// e^{i phi} (s + i omega - gamma/2) / (s + i omega + gamma/2)
inline Complex cavity_closed_form(double gamma, double omega, double phi, Complex s) {
    const Complex j{0.0, 1.0};
    return std::polar(1.0, phi) * (s + j * omega - 0.5 * gamma) / (s + j * omega + 0.5 * gamma);
}

// Xi(s) via the explicit inverse of (sI - A), no shared solve path.
inline ComplexMatrix transfer_by_inverse(const LinearComponent& comp, Complex s) {
    const auto m = static_cast<Eigen::Index>(comp.m_modes());
    const ComplexMatrix a = -0.5 * comp.C().adjoint() * comp.C() - Complex(0.0, 1.0) * comp.Omega();
    const ComplexMatrix resolvent = (s * ComplexMatrix::Identity(m, m) - a).inverse();
    return comp.S() - comp.C() * resolvent * comp.C().adjoint() * comp.S();
}

// Star product of a (inner port a_in) and b (inner port b_in) built from two
// single-channel reductions. The first channel is eliminated with the freed
// port pair left as a self-loop, which the second reduction closes.
// first_a_to_b selects which of the two channels goes first.
inline LinearComponent star_by_single_edges(const LinearComponent& a, const LinearComponent& b,
                                            std::size_t a_in, std::size_t b_in, bool first_a_to_b) {
    const LinearComponent both = concatenate(a, b, "a", "b");
    const std::size_t n = both.n_ports();
    const std::size_t a_port = a_in;
    const std::size_t b_port = a.n_ports() + b_in;
    // first channel: from_out -> to_in
    const std::size_t from_out = first_a_to_b ? a_port : b_port;
    const std::size_t to_in = first_a_to_b ? b_port : a_port;

    ExternalPorts ext;
    for (std::size_t p = 0; p < n; ++p) {
        if (p == to_in) continue;
        ext.inputs.push_back(p);
        ext.outputs.push_back(p == from_out ? to_in : p);
    }
    const std::size_t loop =
        static_cast<std::size_t>(std::find(ext.inputs.begin(), ext.inputs.end(), from_out) - ext.inputs.begin());
    ext.labels.assign(ext.inputs.size(), "");
    for (std::size_t j = 0; j < ext.labels.size(); ++j) ext.labels[j] = std::to_string(j);

    const PartitionedComponent first(both, {from_out}, {to_in}, ComplexMatrix::Identity(1, 1), ext);
    const LinearComponent half = feedback_reduce(first);
    const PartitionedComponent second(half, {loop}, {loop}, ComplexMatrix::Identity(1, 1));
    return feedback_reduce(second);
}

}  // namespace qfn::testing
