// stratcal.hpp: conversion between Stratonovich generators (E, F, K) and
// the Ito parameters (S, C, Omega) of a linear component.

#pragma once

#include "qfn/slh.hpp"

#include <algorithm>

namespace qfn {

struct StratonovichModel {
    ComplexMatrix E;  // n x n hermitian, scattering generator
    ComplexMatrix F;  // n x m, coupling generator coefficients
    ComplexMatrix K;  // m x m hermitian
};

// S = (I - iE/2)(I + iE/2)^{-1}
// C = -i (I + iE/2)^{-1} F
// Omega = K + RePart{F'C / 2}
// Throws NotHermitian if E or K is not hermitian, DimensionMismatch on shapes.
LinearComponent strat_to_ito(const StratonovichModel& sm);

// E = 2i (S - I)(S + I)^{-1},  F = i (I + iE/2) C,  K = Omega - RePart{F'C / 2}.
// Throws CayleySingular when -1 is an eigenvalue of S.
StratonovichModel ito_to_strat(const LinearComponent& comp);

// Max-norm residuals of the Ito-table consistency system:
//   scattering: (S - I) + iE + (i/2) E (S - I)
//   coupling:   C + iF + (i/2) E C
//   damping:    (-C'C/2 - i Omega) - (-iK - (i/2) F'C)
struct ItoTableResiduals {
    double scattering = 0.0;
    double coupling = 0.0;
    double damping = 0.0;

    double max() const { return std::max({scattering, coupling, damping}); }
};

ItoTableResiduals ito_table_residuals(const StratonovichModel& sm, const LinearComponent& comp);

// exp(-2i arctan(E/2)) by spectral calculus on hermitian E.
ComplexMatrix scattering_from_generator(const ComplexMatrix& e);

}  // namespace qfn
