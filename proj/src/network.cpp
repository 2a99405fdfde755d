#include "qfn/network.hpp"

#include "qfn/errors.hpp"
#include "qfn/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

namespace qfn {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& used) {
    const std::set<std::size_t> taken(used.begin(), used.end());
    std::vector<std::size_t> out;
    for (std::size_t p = 0; p < n; ++p) {
        if (!taken.contains(p)) out.push_back(p);
    }
    return out;
}

void require_distinct_in_range(const std::vector<std::size_t>& ports, std::size_t n,
                               const char* what) {
    std::set<std::size_t> seen;
    for (std::size_t p : ports) {
        if (p >= n) throw BadPartition(std::string(what) + ": port " + std::to_string(p) + " out of range");
        if (!seen.insert(p).second) {
            throw BadPartition(std::string(what) + ": port " + std::to_string(p) + " listed twice");
        }
    }
}

bool is_permutation_matrix(const ComplexMatrix& eta) {
    if (eta.rows() != eta.cols()) return false;
    for (Eigen::Index i = 0; i < eta.rows(); ++i) {
        int row_ones = 0;
        int col_ones = 0;
        for (Eigen::Index j = 0; j < eta.cols(); ++j) {
            const Complex r = eta(i, j);
            const Complex c = eta(j, i);
            if (r != Complex(0.0) && r != Complex(1.0)) return false;
            row_ones += r == Complex(1.0);
            col_ones += c == Complex(1.0);
        }
        if (row_ones != 1 || col_ones != 1) return false;
    }
    return true;
}

std::string channel_label(const std::string& in, const std::string& out) {
    return in == out ? in : in + "~" + out;
}

// (eta - S_ii)^{-1} applied to rhs, with singularity reported as an
// algebraic loop.
ComplexMatrix loop_solve(const PartitionedComponent& pc, const ComplexMatrix& rhs) {
    try {
        return solve(pc.eta() - pc.S_ii(), rhs);
    } catch (const SingularMatrix&) {
        throw AlgebraicLoop("eta - S_ii is singular: instantaneous feedback cannot be eliminated");
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// PartitionedComponent

PartitionedComponent::PartitionedComponent(LinearComponent comp,
                                           std::vector<std::size_t> internal_out,
                                           std::vector<std::size_t> internal_in, ComplexMatrix eta,
                                           std::optional<ExternalPorts> external)
    : comp_(std::move(comp)),
      internal_out_(std::move(internal_out)),
      internal_in_(std::move(internal_in)),
      eta_(std::move(eta)) {
    const std::size_t n = comp_.n_ports();
    if (internal_out_.size() != internal_in_.size()) {
        throw BadPartition("internal input and output multiplicities differ");
    }
    require_distinct_in_range(internal_out_, n, "internal outputs");
    require_distinct_in_range(internal_in_, n, "internal inputs");
    if (eta_.rows() != idx(internal_in_.size()) || !is_permutation_matrix(eta_)) {
        throw BadPartition("eta must be a " + std::to_string(internal_in_.size()) + "x" +
                           std::to_string(internal_in_.size()) + " permutation matrix");
    }

    const auto free_in = complement(n, internal_in_);
    const auto free_out = complement(n, internal_out_);
    if (external) {
        external_ = std::move(*external);
        auto sorted_in = external_.inputs;
        auto sorted_out = external_.outputs;
        std::sort(sorted_in.begin(), sorted_in.end());
        std::sort(sorted_out.begin(), sorted_out.end());
        if (sorted_in != free_in || sorted_out != free_out) {
            throw BadPartition("external ports must be exactly the ports not used by channels");
        }
    } else {
        external_.inputs = free_in;
        external_.outputs = free_out;
    }
    if (external_.labels.empty()) {
        for (std::size_t j = 0; j < external_.inputs.size(); ++j) {
            external_.labels.push_back(channel_label(comp_.port_labels()[external_.inputs[j]],
                                                     comp_.port_labels()[external_.outputs[j]]));
        }
    } else if (external_.labels.size() != external_.inputs.size()) {
        throw BadPartition("external label count mismatch");
    }
}

PartitionedComponent PartitionedComponent::from_channels(LinearComponent comp,
                                                         std::span<const Channel> channels,
                                                         std::optional<ExternalPorts> external) {
    std::vector<std::size_t> outs;
    std::vector<std::size_t> ins;
    for (const auto& ch : channels) {
        outs.push_back(ch.from_output);
        ins.push_back(ch.to_input);
    }
    std::sort(outs.begin(), outs.end());
    std::sort(ins.begin(), ins.end());
    const std::size_t k = channels.size();
    ComplexMatrix eta = ComplexMatrix::Zero(idx(k), idx(k));
    for (const auto& ch : channels) {
        const auto a = std::lower_bound(outs.begin(), outs.end(), ch.from_output) - outs.begin();
        const auto b = std::lower_bound(ins.begin(), ins.end(), ch.to_input) - ins.begin();
        eta(a, b) += 1.0;
    }
    return PartitionedComponent(std::move(comp), std::move(outs), std::move(ins), std::move(eta),
                                std::move(external));
}

ComplexMatrix PartitionedComponent::S_ii() const { return select(comp_.S(), internal_out_, internal_in_); }
ComplexMatrix PartitionedComponent::S_ie() const { return select(comp_.S(), internal_out_, external_.inputs); }
ComplexMatrix PartitionedComponent::S_ei() const { return select(comp_.S(), external_.outputs, internal_in_); }
ComplexMatrix PartitionedComponent::S_ee() const {
    return select(comp_.S(), external_.outputs, external_.inputs);
}
ComplexMatrix PartitionedComponent::C_i() const { return select_rows(comp_.C(), internal_out_); }
ComplexMatrix PartitionedComponent::C_e() const { return select_rows(comp_.C(), external_.outputs); }

// ---------------------------------------------------------------------------
// Feedback reduction

LinearComponent feedback_reduce(const PartitionedComponent& pc) {
    const ComplexMatrix s_ii = pc.S_ii();
    const ComplexMatrix s_ie = pc.S_ie();
    const ComplexMatrix s_ei = pc.S_ei();
    const ComplexMatrix c_i = pc.C_i();
    const ComplexMatrix c_e = pc.C_e();

    ComplexMatrix rhs(s_ie.rows(), s_ie.cols() + c_i.cols());
    rhs << s_ie, c_i;
    const ComplexMatrix resolved = loop_solve(pc, rhs);
    const auto via_s = resolved.leftCols(s_ie.cols());
    const auto via_c = resolved.rightCols(c_i.cols());

    ComplexMatrix s_red = pc.S_ee() + s_ei * via_s;
    ComplexMatrix c_red = s_ei * via_c + c_e;
    ComplexMatrix omega_red = pc.component().Omega() + im_part(c_i.adjoint() * s_ii * via_c) +
                              im_part(c_e.adjoint() * s_ei * via_c);
    return LinearComponent(std::move(s_red), std::move(c_red), std::move(omega_red),
                           pc.external_labels(), pc.component().mode_labels());
}

ComplexMatrix reduced_drift(const PartitionedComponent& pc) {
    const ComplexMatrix via_c = loop_solve(pc, pc.C_i());
    return drift(pc.component()) -
           (pc.C_i().adjoint() * pc.S_ii() + pc.C_e().adjoint() * pc.S_ei()) * via_c;
}

ComplexMatrix loop_identity_residual(const PartitionedComponent& pc) {
    const ComplexMatrix c_i = pc.C_i();
    const ComplexMatrix via_c = loop_solve(pc, c_i);
    return im_part(c_i.adjoint() * pc.S_ii() * via_c) - im_part(c_i.adjoint() * via_c);
}

// ---------------------------------------------------------------------------
// Series and cascade

PartitionedComponent series_network(const LinearComponent& g2, const LinearComponent& g1) {
    const std::size_t n = g1.n_ports();
    if (g2.n_ports() != n) {
        throw DimensionMismatch("series: g1 has " + std::to_string(n) + " ports, g2 has " +
                                std::to_string(g2.n_ports()));
    }
    std::vector<Channel> channels;
    ExternalPorts external;
    for (std::size_t j = 0; j < n; ++j) {
        channels.push_back({j, n + j});
        external.inputs.push_back(j);
        external.outputs.push_back(n + j);
    }
    return PartitionedComponent::from_channels(concatenate(g1, g2, "g1", "g2"), channels,
                                               std::move(external));
}

LinearComponent series_product(const LinearComponent& g2, const LinearComponent& g1) {
    if (g2.n_ports() != g1.n_ports()) {
        throw DimensionMismatch("series: g1 has " + std::to_string(g1.n_ports()) +
                                " ports, g2 has " + std::to_string(g2.n_ports()));
    }
    const Eigen::Index m1 = idx(g1.m_modes());
    const Eigen::Index m2 = idx(g2.m_modes());

    ComplexMatrix c(g1.C().rows(), m1 + m2);
    c << g2.S() * g1.C(), g2.C();

    // L2' S2 L1 couples g1's modes (columns) to g2's modes (rows).
    ComplexMatrix coupling = ComplexMatrix::Zero(m1 + m2, m1 + m2);
    coupling.bottomLeftCorner(m2, m1) = g2.C().adjoint() * g2.S() * g1.C();
    ComplexMatrix omega = block_diag(g1.Omega(), g2.Omega()) + im_part(coupling);

    // Labels follow the series wiring of the concatenation.
    const PartitionedComponent wiring = series_network(g2, g1);
    return LinearComponent(g2.S() * g1.S(), std::move(c), std::move(omega),
                           wiring.external_labels(), wiring.component().mode_labels());
}

CascadeReport cascade_transfer_check(const LinearComponent& g2, const LinearComponent& g1,
                                     std::span<const Complex> s_points, double tol) {
    const LinearComponent series = series_product(g2, g1);
    CascadeReport report;
    report.tol = tol;
    for (const Complex s : s_points) {
        const ComplexMatrix lhs = eval_transfer(series, s).Xi;
        const ComplexMatrix rhs = eval_transfer(g2, s).Xi * eval_transfer(g1, s).Xi;
        const double r = max_abs(lhs - rhs);
        report.points.push_back(s);
        report.residuals.push_back(r);
        report.max_residual = std::max(report.max_residual, r);
        if (!(r <= tol)) report.pass = false;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Beam splitters and the Moebius transform

BeamSplitter::BeamSplitter(ComplexMatrix t, std::size_t n1, std::size_t n2)
    : t_(std::move(t)), n1_(n1), n2_(n2) {
    if (t_.rows() != idx(n1 + n2) || t_.cols() != idx(n1 + n2)) {
        throw DimensionMismatch("beam splitter matrix must be " + std::to_string(n1 + n2) +
                                " square");
    }
    if (!is_unitary(t_)) {
        throw Error("beam splitter matrix is not unitary (residual " +
                    std::to_string(unitarity_residual(t_)) + ")");
    }
}

BeamSplitter BeamSplitter::real_symmetric(double alpha) {
    const double beta = std::sqrt(1.0 - alpha * alpha);
    ComplexMatrix t(2, 2);
    t << alpha, beta, beta, -alpha;
    return BeamSplitter(std::move(t), 1, 1);
}

ComplexMatrix BeamSplitter::t11() const { return t_.topLeftCorner(idx(n1_), idx(n1_)); }
ComplexMatrix BeamSplitter::t12() const { return t_.topRightCorner(idx(n1_), idx(n2_)); }
ComplexMatrix BeamSplitter::t21() const { return t_.bottomLeftCorner(idx(n2_), idx(n1_)); }
ComplexMatrix BeamSplitter::t22() const { return t_.bottomRightCorner(idx(n2_), idx(n2_)); }

ComplexMatrix mobius(const BeamSplitter& t, const ComplexMatrix& x) {
    if (x.rows() != idx(t.n2()) || x.cols() != idx(t.n2())) {
        throw DimensionMismatch("mobius: argument must be " + std::to_string(t.n2()) + " square");
    }
    try {
        return t.t11() + t.t12() * solve(identity(t.n2()) - x * t.t22(), x * t.t21());
    } catch (const SingularMatrix&) {
        throw OutsideDomain("mobius: I - X T22 is singular");
    }
}

LinearComponent beamsplitter_loop(const BeamSplitter& t, const LinearComponent& plant) {
    if (plant.n_ports() != t.n2()) {
        throw DimensionMismatch("beam splitter loop: plant has " + std::to_string(plant.n_ports()) +
                                " ports, splitter loop block has " + std::to_string(t.n2()));
    }
    const ComplexMatrix& s0 = plant.S();
    const ComplexMatrix& c0 = plant.C();
    ComplexMatrix rhs(s0.rows(), t.t21().cols() + c0.cols());
    rhs << s0 * t.t21(), c0;
    ComplexMatrix resolved;
    try {
        resolved = solve(identity(t.n2()) - s0 * t.t22(), rhs);
    } catch (const SingularMatrix&) {
        throw AlgebraicLoop("beam splitter loop: 1 - S0 T22 is singular");
    }
    const auto via_s = resolved.leftCols(t.t21().cols());
    const auto via_c = resolved.rightCols(c0.cols());

    ComplexMatrix s = t.t11() + t.t12() * via_s;
    ComplexMatrix c = t.t12() * via_c;
    ComplexMatrix omega = plant.Omega() + im_part(c0.adjoint() * via_c);
    return LinearComponent(std::move(s), std::move(c), std::move(omega), {}, plant.mode_labels());
}

PartitionedComponent beamsplitter_network(const BeamSplitter& t, const LinearComponent& plant) {
    if (plant.n_ports() != t.n2()) {
        throw DimensionMismatch("beam splitter network: plant port count mismatch");
    }
    const std::size_t n1 = t.n1();
    const std::size_t n2 = t.n2();
    std::vector<Channel> channels;
    for (std::size_t j = 0; j < n2; ++j) {
        channels.push_back({n1 + j, n1 + n2 + j});
        channels.push_back({n1 + n2 + j, n1 + j});
    }
    return PartitionedComponent::from_channels(
        concatenate(make_static(t.matrix()), plant, "bs", "plant"), channels);
}

// ---------------------------------------------------------------------------
// Redheffer star product

StarWiring StarWiring::split(std::size_t n_a, std::size_t n_b, std::size_t k) {
    if (k > n_a || k > n_b) throw BadPartition("star wiring: more inner channels than ports");
    StarWiring w;
    for (std::size_t p = 0; p < n_a; ++p) (p < n_a - k ? w.a_outer : w.a_inner).push_back(p);
    for (std::size_t p = 0; p < n_b; ++p) (p < k ? w.b_inner : w.b_outer).push_back(p);
    return w;
}

PartitionedComponent star_network(const LinearComponent& a, const LinearComponent& b,
                                  const StarWiring& wiring) {
    const std::size_t n_a = a.n_ports();
    const std::size_t k = wiring.a_inner.size();
    if (wiring.b_inner.size() != k) throw BadPartition("star wiring: inner blocks differ in size");
    if (wiring.a_outer.size() + k != n_a || wiring.b_outer.size() + k != b.n_ports()) {
        throw BadPartition("star wiring must cover every port exactly once");
    }

    std::vector<std::size_t> internal;
    for (std::size_t p : wiring.a_inner) internal.push_back(p);
    for (std::size_t p : wiring.b_inner) internal.push_back(n_a + p);
    ComplexMatrix eta = ComplexMatrix::Zero(idx(2 * k), idx(2 * k));
    eta.topRightCorner(idx(k), idx(k)).setIdentity();
    eta.bottomLeftCorner(idx(k), idx(k)).setIdentity();

    ExternalPorts external;
    for (std::size_t p : wiring.a_outer) external.inputs.push_back(p);
    for (std::size_t p : wiring.b_outer) external.inputs.push_back(n_a + p);
    external.outputs = external.inputs;

    return PartitionedComponent(concatenate(a, b, "a", "b"), internal, internal, std::move(eta),
                                std::move(external));
}

LinearComponent redheffer_star(const LinearComponent& a, const LinearComponent& b,
                               const StarWiring& wiring) {
    return feedback_reduce(star_network(a, b, wiring));
}

ComplexMatrix star_scattering(const ComplexMatrix& sa, const ComplexMatrix& sb,
                              const StarWiring& w) {
    const ComplexMatrix s11 = select(sa, w.a_outer, w.a_outer);
    const ComplexMatrix s12 = select(sa, w.a_outer, w.a_inner);
    const ComplexMatrix s21 = select(sa, w.a_inner, w.a_outer);
    const ComplexMatrix s22 = select(sa, w.a_inner, w.a_inner);
    const ComplexMatrix s33 = select(sb, w.b_inner, w.b_inner);
    const ComplexMatrix s34 = select(sb, w.b_inner, w.b_outer);
    const ComplexMatrix s43 = select(sb, w.b_outer, w.b_inner);
    const ComplexMatrix s44 = select(sb, w.b_outer, w.b_outer);
    const std::size_t k = w.a_inner.size();

    ComplexMatrix loop_ab, loop_ba;
    try {
        loop_ab = solve(identity(k) - s22 * s33, identity(k));  // (1 - S22 S33)^{-1}
        loop_ba = solve(identity(k) - s33 * s22, identity(k));  // (1 - S33 S22)^{-1}
    } catch (const SingularMatrix&) {
        throw AlgebraicLoop("star product: 1 - S22 S33 is singular");
    }

    const Eigen::Index e1 = s11.rows();
    const Eigen::Index e4 = s44.rows();
    ComplexMatrix out(e1 + e4, e1 + e4);
    out.topLeftCorner(e1, e1) = s11 + s12 * s33 * loop_ab * s21;
    out.topRightCorner(e1, e4) = s12 * loop_ba * s34;
    out.bottomLeftCorner(e4, e1) = s43 * loop_ab * s21;
    out.bottomRightCorner(e4, e4) = s44 + s43 * loop_ab * s22 * s34;
    return out;
}

// ---------------------------------------------------------------------------
// Path expansion

PathExpansionReport path_expansion_check(const PartitionedComponent& pc, std::size_t order) {
    const LinearComponent closed = feedback_reduce(pc);
    const ComplexMatrix xi = pc.eta().adjoint();  // inverse of a permutation
    const ComplexMatrix s_ii = pc.S_ii();
    const ComplexMatrix s_ei = pc.S_ei();
    const ComplexMatrix loop = s_ii * xi;

    PathExpansionReport report;
    report.loop_spectral_radius = spectral_radius(loop);
    report.convergent = report.loop_spectral_radius < 1.0;

    ComplexMatrix partial_s = pc.S_ee();
    ComplexMatrix partial_c = pc.C_e();
    ComplexMatrix walk_s = pc.S_ie();  // (S_ii xi)^n S_ie
    ComplexMatrix walk_c = pc.C_i();   // (S_ii xi)^n C_i
    for (std::size_t n = 0; n <= order; ++n) {
        partial_s += s_ei * xi * walk_s;
        partial_c += s_ei * xi * walk_c;
        report.scattering_residuals.push_back(max_abs(partial_s - closed.S()));
        report.coupling_residuals.push_back(max_abs(partial_c - closed.C()));
        walk_s = loop * walk_s;
        walk_c = loop * walk_c;
    }
    const auto& r = report.scattering_residuals;
    if (r.size() >= 2 && r[r.size() - 2] > 0.0) report.decay_rate = r.back() / r[r.size() - 2];
    return report;
}

}  // namespace qfn
