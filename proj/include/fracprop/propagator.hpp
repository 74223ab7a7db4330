#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fracprop/fracops.hpp"
#include "fracprop/mlf.hpp"
#include "fracprop/spectral.hpp"

namespace fracprop {

// The multiplication-operator picture of a positive self-adjoint generator:
// either an eigendecomposition of a Hermitian matrix or a periodic grid on
// which -d^2/dx^2 is diagonalised by the DFT.
using SpectralModel = std::variant<Decomposition, PeriodicGrid>;

std::size_t model_dim(const SpectralModel& model);

// Spectral values a_j in the model's own ordering (ascending eigenvalues, or
// xi_m^2 in FFT order).
std::vector<double> spectral_values(const SpectralModel& model);

// W diag(m) W^{-1} x for one multiplier value per spectral value.
State apply_spectral(const SpectralModel& model, std::span<const std::complex<double>> m,
                     const State& x);

// A x through the spectral map.
State apply_generator(const SpectralModel& model, const State& x);

// U_alpha(t) = W E_alpha((-it)^alpha a) W^{-1}.
class SolutionFamily {
public:
    SolutionFamily(SpectralModel model, FractionalOrder order, MLOptions options = {})
        : model_(std::move(model)), order_(order), options_(options) {}

    const SpectralModel& model() const noexcept { return model_; }
    const FractionalOrder& order() const noexcept { return order_; }
    const MLOptions& options() const noexcept { return options_; }

private:
    SpectralModel model_;
    FractionalOrder order_;
    MLOptions options_;
};

// E_alpha((-it)^alpha a_j) for every spectral value. Repeated spectral values
// are evaluated once. Failures raise EvaluationFailure naming the value.
std::vector<std::complex<double>> solution_multipliers(const SolutionFamily& family, double t);

State propagate(const SolutionFamily& family, double t, const State& u0);

// U_alpha(t)^* u0 = W E_alpha((it)^alpha a) W^{-1} u0, computed as the
// conjugate multiplier (E_alpha has real Taylor coefficients and a is real).
State adjoint_propagate(const SolutionFamily& family, double t, const State& u0);

// |E_alpha((-it)^alpha a_j)|^2 per spectral value: the multiplier of
// U U^* = U^* U.
std::vector<double> gram_multiplier(const SolutionFamily& family, double t);

// e^{-itA} u0.
State unitary_reference(const SpectralModel& model, double t, const State& u0);

struct AlphaError {
    double alpha = 0.0;
    double error = 0.0;   // ||U_alpha(t) u0 - e^{-itA} u0||; NaN on failure
    std::string failure;  // empty on success
};

// error(alpha) for each alpha in (0, 1), in input order. A failing alpha is
// reported in its entry without aborting the sweep.
std::vector<AlphaError> alpha_sweep(const SpectralModel& model, std::span<const double> alphas,
                                    double t, const State& u0, const MLOptions& options = {});

struct NormSample {
    double t = 0.0;
    double norm = 0.0;
};

// ||U_alpha(t) u0|| for each t; ts must be nonnegative and ascending.
std::vector<NormSample> norm_trace(const SolutionFamily& family, const State& u0,
                                   std::span<const double> ts);

// ||A U(t) u0 - U(t) A u0|| with A applied through the spectral map.
double commutation_defect(const SolutionFamily& family, double t, const State& u0);

// Solution of the fractional free Schroedinger problem on a periodic grid.
State free_propagate(const PeriodicGrid& grid, const FractionalOrder& order, double t,
                     const State& g, const MLOptions& options = {});

struct Certificate {
    double residual = 0.0;            // max over channels
    std::size_t skipped_nodes = 0;    // leading nodes excluded from every channel
    std::vector<double> channel_residuals;
};

// Propagates u0 along the time grid, projects each state onto the eigenbasis
// and checks every channel v_j(t) against the L1 oracle:
//   D^alpha v_j = (-i)^alpha a_j v_j.
// Requires a matrix model (Decomposition) and a grid of at least 100 nodes.
Certificate residual_certify(const SolutionFamily& family, const TimeGrid& grid, const State& u0);

}  // namespace fracprop
