// transfer.hpp: transfer matrix functions Xi(s) = S - C (sI - A)^{-1} C'S
// and xi(s) = C (sI - A)^{-1}, evaluated pointwise.

#pragma once

#include "qfn/slh.hpp"

#include <optional>
#include <span>
#include <vector>

namespace qfn {

// Offset realizing s = 0+ + i omega on the imaginary axis.
inline constexpr double kAxisOffset = 1e-10;

struct TransferEvaluation {
    Complex s;
    ComplexMatrix Xi;  // n x n
    ComplexMatrix xi;  // n x m
};

// Throws SingularAtS when s is a pole.
TransferEvaluation eval_transfer(const LinearComponent& comp, Complex s);

// A grid point whose value is empty marks a pole.
struct FrequencyPoint {
    double omega = 0.0;
    std::optional<TransferEvaluation> value;
};

std::vector<FrequencyPoint> freq_response(const LinearComponent& comp,
                                          std::span<const double> omegas,
                                          double sigma = kAxisOffset);

struct AxisUnitarityReport {
    std::vector<double> omegas;
    std::vector<std::optional<double>> residuals;  // empty at poles
    double max_residual = 0.0;
    double tol = 0.0;
    bool pass = true;
};

// Residual per point is max(|Xi Xi' - I|, |Xi' Xi - I|).
AxisUnitarityReport check_unitary_on_axis(const LinearComponent& comp,
                                          std::span<const double> omegas, double tol,
                                          double sigma = kAxisOffset);

// Closed form for the case where A is a function of C'C:
//   Xi(s) = sum_k (s - gamma_k/2 + i eps_k) / (s + gamma_k/2 + i eps_k) E_k S
// with gamma_k, E_k the spectral data of CC'.
struct CommutingForm {
    std::vector<double> gammas;
    std::vector<double> epsilons;
    std::vector<ComplexMatrix> projectors;
    ComplexMatrix S;

    ComplexMatrix evaluate(Complex s) const;
};

CommutingForm commuting_form(const LinearComponent& comp, double tol = kStructuralTol);

struct PoleZeroSet {
    std::vector<Complex> poles;
    std::vector<Complex> zeros;
};

// poles -gamma_k/2 - i eps_k, zeros +gamma_k/2 - i eps_k (mirror images
// through the imaginary axis).
PoleZeroSet poles_zeros_commuting(const CommutingForm& cf);

}  // namespace qfn
