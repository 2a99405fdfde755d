// Random generators for property tests. Every draw is from a seeded
// std::mt19937_64 so failures reproduce.

#pragma once

#include "qfn/network.hpp"
#include "qfn/slh.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

namespace qfn::testing {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
    std::size_t index(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
    }
    Complex gaussian() { return {normal(), normal()}; }

    ComplexMatrix gaussian_matrix(std::size_t rows, std::size_t cols, double scale = 1.0) {
        ComplexMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = scale * gaussian();
        }
        return m;
    }

    // Haar-distributed: QR of a Ginibre matrix with the phases of R's
    // diagonal moved into Q.
    ComplexMatrix unitary(std::size_t n) {
        if (n == 0) return ComplexMatrix(0, 0);
        const ComplexMatrix g = gaussian_matrix(n, n);
        Eigen::HouseholderQR<ComplexMatrix> qr(g);
        ComplexMatrix q = qr.householderQ();
        const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
        for (Eigen::Index k = 0; k < q.cols(); ++k) {
            const Complex d = r(k, k);
            q.col(k) *= std::abs(d) > 0.0 ? d / std::abs(d) : Complex(1.0);
        }
        return q;
    }

    ComplexMatrix hermitian(std::size_t n, double scale = 1.0) {
        const ComplexMatrix g = gaussian_matrix(n, n, scale);
        return 0.5 * (g + g.adjoint());
    }

    // Valid component: unitary S, hermitian Omega, arbitrary C.
    LinearComponent component(std::size_t n, std::size_t m) {
        return LinearComponent(unitary(n), gaussian_matrix(n, m), hermitian(m));
    }

    std::vector<std::size_t> permutation(std::size_t n) {
        std::vector<std::size_t> p(n);
        std::iota(p.begin(), p.end(), std::size_t{0});
        std::shuffle(p.begin(), p.end(), engine_);
        return p;
    }

    // k distinct indices out of 0..n-1, in random order.
    std::vector<std::size_t> subset(std::size_t n, std::size_t k) {
        auto p = permutation(n);
        p.resize(k);
        return p;
    }

    // Point in the open right half plane.
    Complex right_half_plane(double re_lo = 0.05, double re_hi = 3.0, double im_span = 5.0) {
        return {uniform(re_lo, re_hi), uniform(-im_span, im_span)};
    }

    // Random k-channel feedback wiring on a random component with n ports.
    PartitionedComponent partitioned(std::size_t n, std::size_t m, std::size_t k) {
        const auto outs = subset(n, k);
        const auto ins = subset(n, k);
        ComplexMatrix eta = ComplexMatrix::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
        const auto perm = permutation(k);
        for (std::size_t a = 0; a < k; ++a) eta(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(perm[a])) = 1.0;
        return PartitionedComponent(component(n, m), outs, ins, eta);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace qfn::testing
