#include "qfn/errors.hpp"
#include "qfn/stratcal.hpp"
#include "support/random.hpp"

#include <gtest/gtest.h>

namespace qfn {
namespace {

using testing::Rng;

const Complex I{0.0, 1.0};

StratonovichModel random_model(Rng& rng, std::size_t n, std::size_t m) {
    return {rng.hermitian(n, 1.5), rng.gaussian_matrix(n, m), rng.hermitian(m)};
}

TEST(StratToIto, ZeroGenerator) {
    Rng rng(71);
    const StratonovichModel sm{ComplexMatrix::Zero(2, 2), rng.gaussian_matrix(2, 3), rng.hermitian(3)};
    const LinearComponent c = strat_to_ito(sm);
    EXPECT_LE(max_abs(c.S() - identity(2)), 0.0);
    EXPECT_LE(max_abs(c.C() + I * sm.F), 1e-15);
    // F'C/2 = -i F'F/2 is anti-hermitian, so Omega = K
    EXPECT_LE(max_abs(c.Omega() - sm.K), 1e-14);
    EXPECT_LE(ito_table_residuals(sm, c).max(), 1e-14);
}

TEST(StratToIto, ScalarGenerator) {
    const StratonovichModel sm{ComplexMatrix::Constant(1, 1, 2.0), ComplexMatrix(1, 0), ComplexMatrix(0, 0)};
    const LinearComponent c = strat_to_ito(sm);
    EXPECT_LE(std::abs(c.S()(0, 0) - (1.0 - I) / (1.0 + I)), 1e-15);
    EXPECT_LE(std::abs(c.S()(0, 0) + I), 1e-15);
    EXPECT_LE(max_abs(scattering_from_generator(sm.E) - c.S()), 1e-15);
}

TEST(StratToIto, CayleyIsUnitaryAndMatchesArctanForm) {
    Rng rng(72);
    for (int k = 0; k < 100; ++k) {
        const std::size_t n = rng.index(1, 4);
        const StratonovichModel sm = random_model(rng, n, rng.index(0, 3));
        const LinearComponent c = strat_to_ito(sm);
        EXPECT_LE(unitarity_residual(c.S()), 1e-10);
        EXPECT_LE(max_abs(c.S() - scattering_from_generator(sm.E)), 1e-9);
        EXPECT_TRUE(validate(c).ok());
        EXPECT_LE(ito_table_residuals(sm, c).max(), 1e-10);
    }
}

TEST(StratToIto, RejectsNonHermitianInput) {
    ComplexMatrix e = ComplexMatrix::Zero(2, 2);
    e(0, 1) = 1.0;
    EXPECT_THROW(strat_to_ito({e, ComplexMatrix(2, 0), ComplexMatrix(0, 0)}), NotHermitian);
    ComplexMatrix k = ComplexMatrix::Constant(1, 1, I);
    EXPECT_THROW(strat_to_ito({identity(1), ComplexMatrix::Zero(1, 1), k}), NotHermitian);
}

TEST(ItoToStrat, IdentityScattering) {
    Rng rng(73);
    const LinearComponent c(identity(2), rng.gaussian_matrix(2, 2), rng.hermitian(2));
    const StratonovichModel sm = ito_to_strat(c);
    EXPECT_LE(max_abs(sm.E), 1e-15);
    EXPECT_LE(max_abs(sm.F - I * c.C()), 1e-15);
    EXPECT_LE(max_abs(sm.K - c.Omega()), 1e-14);
}

TEST(ItoToStrat, MinusOneIsCayleySingular) {
    EXPECT_THROW(ito_to_strat(make_cavity({1.0, 0.0, std::acos(-1.0)})), CayleySingular);
}

TEST(RoundTrip, BothDirections) {
    Rng rng(74);
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = rng.index(1, 4), m = rng.index(0, 3);
        const StratonovichModel sm = random_model(rng, n, m);
        const StratonovichModel back = ito_to_strat(strat_to_ito(sm));
        EXPECT_LE(max_abs(back.E - sm.E), 1e-9);
        EXPECT_LE(max_abs(back.F - sm.F), 1e-9);
        EXPECT_LE(max_abs(back.K - sm.K), 1e-9);

        const LinearComponent comp = rng.component(n, m);
        if (std::abs((comp.S() + identity(n)).determinant()) < 1e-3) continue;
        const StratonovichModel forward = ito_to_strat(comp);
        EXPECT_LE(ito_table_residuals(forward, comp).max(), 1e-10);
        const LinearComponent again = strat_to_ito(forward);
        EXPECT_LE(max_abs(again.S() - comp.S()), 1e-9);
        EXPECT_LE(max_abs(again.C() - comp.C()), 1e-9);
        EXPECT_LE(max_abs(again.Omega() - comp.Omega()), 1e-9);
    }
}

TEST(Residuals, CouplingPerturbationIsLinear) {
    Rng rng(75);
    const StratonovichModel sm = random_model(rng, 2, 2);
    const LinearComponent c = strat_to_ito(sm);
    ComplexMatrix bumped = c.C();
    bumped(0, 0) += 1e-3;
    const auto r = ito_table_residuals(sm, LinearComponent(c.S(), bumped, c.Omega()));
    EXPECT_LE(r.scattering, 1e-12);
    // the residual is (I + iE/2) applied to the bump, and |1 + iE_00/2| >= 1
    ComplexMatrix bump = ComplexMatrix::Zero(2, 2);
    bump(0, 0) = 1e-3;
    EXPECT_NEAR(r.coupling, max_abs((identity(2) + 0.5 * I * sm.E) * bump), 1e-12);
    EXPECT_GE(r.coupling, 1e-3 - 1e-12);
}

TEST(Residuals, AllZeroModel) {
    const StratonovichModel sm{ComplexMatrix::Zero(2, 2), ComplexMatrix::Zero(2, 1), ComplexMatrix::Zero(1, 1)};
    const LinearComponent c(identity(2), ComplexMatrix::Zero(2, 1), ComplexMatrix::Zero(1, 1));
    const auto r = ito_table_residuals(sm, c);
    EXPECT_EQ(r.scattering, 0.0);
    EXPECT_EQ(r.coupling, 0.0);
    EXPECT_EQ(r.damping, 0.0);
}

}  // namespace
}  // namespace qfn
