// network.hpp: composition algebra for linear components under
// instantaneous feedback: general feedback reduction, series product,
// beam-splitter loops, the non-commutative Moebius transform and the
// Redheffer star product.
//
// Port convention: S maps inputs (columns) to outputs (rows), so an internal
// channel joins an output index to an input index of the same component.

#pragma once

#include "qfn/slh.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qfn {

struct Channel {
    std::size_t from_output = 0;
    std::size_t to_input = 0;
};

// Ordering and naming of the ports that stay open after reduction. Position
// j of the reduced component pairs inputs[j] with outputs[j].
struct ExternalPorts {
    std::vector<std::size_t> inputs;
    std::vector<std::size_t> outputs;
    std::vector<std::string> labels;  // optional; derived from the component when empty
};

class PartitionedComponent {
public:
    // eta(a, b) = 1 iff internal output internal_out[a] feeds internal input
    // internal_in[b]. Throws BadPartition when eta is not a permutation or
    // the index sets are inconsistent.
    PartitionedComponent(LinearComponent comp, std::vector<std::size_t> internal_out,
                         std::vector<std::size_t> internal_in, ComplexMatrix eta,
                         std::optional<ExternalPorts> external = std::nullopt);

    // Internal outputs and inputs are taken in ascending index order and eta
    // is the permutation induced by the channel list.
    static PartitionedComponent from_channels(LinearComponent comp,
                                              std::span<const Channel> channels,
                                              std::optional<ExternalPorts> external = std::nullopt);

    const LinearComponent& component() const { return comp_; }
    const std::vector<std::size_t>& internal_out() const { return internal_out_; }
    const std::vector<std::size_t>& internal_in() const { return internal_in_; }
    const std::vector<std::size_t>& external_in() const { return external_.inputs; }
    const std::vector<std::size_t>& external_out() const { return external_.outputs; }
    const std::vector<std::string>& external_labels() const { return external_.labels; }
    const ComplexMatrix& eta() const { return eta_; }

    // Blocks of S and C in (internal, external) coordinates.
    ComplexMatrix S_ii() const;
    ComplexMatrix S_ie() const;
    ComplexMatrix S_ei() const;
    ComplexMatrix S_ee() const;
    ComplexMatrix C_i() const;
    ComplexMatrix C_e() const;

private:
    LinearComponent comp_;
    std::vector<std::size_t> internal_out_;
    std::vector<std::size_t> internal_in_;
    ComplexMatrix eta_;
    ExternalPorts external_;
};

// Eliminates every internal channel:
//   S_red = S_ee + S_ei (eta - S_ii)^{-1} S_ie
//   C_red = S_ei (eta - S_ii)^{-1} C_i + C_e
//   Omega_red = Omega + ImPart{C_i' S_ii (eta - S_ii)^{-1} C_i}
//                     + ImPart{C_e' S_ei (eta - S_ii)^{-1} C_i}
// Throws AlgebraicLoop when (eta - S_ii) is singular.
LinearComponent feedback_reduce(const PartitionedComponent& pc);

// State-space route for the reduced drift,
//   A - (C_i' S_ii + C_e' S_ei)(eta - S_ii)^{-1} C_i,
// which must equal drift(feedback_reduce(pc)).
ComplexMatrix reduced_drift(const PartitionedComponent& pc);

// ImPart{C_i' S_ii X^{-1} C_i} - ImPart{C_i' X^{-1} C_i} with X = eta - S_ii.
// Vanishes for eta = I; not in general for other permutations.
ComplexMatrix loop_identity_residual(const PartitionedComponent& pc);

// g1 feeds g2 port-for-port. Modes are ordered g1 then g2:
//   S = S2 S1,  C = [S2 C1 | C2],  Omega = diag(Omega1, Omega2) + ImPart{L2' S2 L1}.
LinearComponent series_product(const LinearComponent& g2, const LinearComponent& g1);

// The concatenation g1 (+) g2 with g1's outputs wired into g2's inputs.
PartitionedComponent series_network(const LinearComponent& g2, const LinearComponent& g1);

struct CascadeReport {
    std::vector<Complex> points;
    std::vector<double> residuals;  // |Xi_series(s) - Xi2(s) Xi1(s)|
    double max_residual = 0.0;
    double tol = 1e-10;
    bool pass = true;
};

CascadeReport cascade_transfer_check(const LinearComponent& g2, const LinearComponent& g1,
                                     std::span<const Complex> s_points, double tol = 1e-10);

// Static unitary with a 2x2 block structure [[T11, T12], [T21, T22]], the
// first block acting on n1 channels and the second on n2.
class BeamSplitter {
public:
    BeamSplitter(ComplexMatrix t, std::size_t n1, std::size_t n2);

    // [[alpha, beta], [beta, -alpha]] with beta = sqrt(1 - alpha^2).
    static BeamSplitter real_symmetric(double alpha);

    const ComplexMatrix& matrix() const { return t_; }
    std::size_t n1() const { return n1_; }
    std::size_t n2() const { return n2_; }
    ComplexMatrix t11() const;
    ComplexMatrix t12() const;
    ComplexMatrix t21() const;
    ComplexMatrix t22() const;

private:
    ComplexMatrix t_;
    std::size_t n1_;
    std::size_t n2_;
};

// T11 + T12 (I - X T22)^{-1} X T21; OutsideDomain when the inverse fails.
ComplexMatrix mobius(const BeamSplitter& t, const ComplexMatrix& x);

// Closed loop where the second splitter block is routed through the plant:
//   S = T11 + T12 (1 - S0 T22)^{-1} S0 T21
//   C = T12 (1 - S0 T22)^{-1} C0
//   Omega = Omega0 + ImPart{C0' (1 - S0 T22)^{-1} C0}
LinearComponent beamsplitter_loop(const BeamSplitter& t, const LinearComponent& plant);

// The same arrangement as an explicit network: splitter ports first, then the
// plant, with channels splitter.out[n1+j] -> plant.in[j] and
// plant.out[j] -> splitter.in[n1+j].
PartitionedComponent beamsplitter_network(const BeamSplitter& t, const LinearComponent& plant);

// Port roles for the star product. Ports of a split into an outer block (1)
// and an inner block (2); ports of b into an inner block (3) and an outer
// block (4). a's inner outputs feed b's inner inputs and vice versa.
struct StarWiring {
    std::vector<std::size_t> a_outer;
    std::vector<std::size_t> a_inner;
    std::vector<std::size_t> b_inner;
    std::vector<std::size_t> b_outer;

    // a: [outer..., inner(k)...], b: [inner(k)..., outer...]
    static StarWiring split(std::size_t n_a, std::size_t n_b, std::size_t k);
};

PartitionedComponent star_network(const LinearComponent& a, const LinearComponent& b,
                                  const StarWiring& wiring);

// Composite with ports [a_outer..., b_outer...]; computed by feedback_reduce.
LinearComponent redheffer_star(const LinearComponent& a, const LinearComponent& b,
                               const StarWiring& wiring);

// Closed-form block expression for the star-product scattering matrix:
//   [[S11 + S12 S33 (1 - S22 S33)^{-1} S21,  S12 (1 - S33 S22)^{-1} S34],
//    [S43 (1 - S22 S33)^{-1} S21,  S44 + S43 (1 - S22 S33)^{-1} S22 S34]]
ComplexMatrix star_scattering(const ComplexMatrix& sa, const ComplexMatrix& sb,
                              const StarWiring& wiring);

struct PathExpansionReport {
    bool convergent = true;
    double loop_spectral_radius = 0.0;     // rho(S_ii eta^{-1})
    std::vector<double> scattering_residuals;  // |S_trunc(N) - S_red|, N = 0..order
    std::vector<double> coupling_residuals;    // |C_trunc(N) - C_red|
    double decay_rate = 0.0;                   // last residual ratio
};

// Compares the path sum S_ee + sum_n S_ei xi (S_ii xi)^n S_ie, xi = eta^{-1},
// truncated at each order up to `order`, with the closed form.
PathExpansionReport path_expansion_check(const PartitionedComponent& pc, std::size_t order);

}  // namespace qfn
