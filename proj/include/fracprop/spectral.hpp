#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>

#include <Eigen/Dense>

namespace fracprop {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Scalar function applied to spectral values: a -> f(a).
using SpectralFunction = std::function<std::complex<double>(double)>;

// A vector of the model Hilbert space. norm() is the Euclidean norm of the
// coefficients (for grid models, the discrete L2 norm up to the factor sqrt(dx)).
class State {
public:
    State() = default;
    explicit State(ComplexVector values) : values_(std::move(values)) {}

    const ComplexVector& values() const noexcept { return values_; }
    ComplexVector& values() noexcept { return values_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
    double norm() const { return values_.norm(); }

private:
    ComplexVector values_;
};

// Square complex matrix equal to its conjugate transpose within 1e-12 per entry.
class HermitianModel {
public:
    explicit HermitianModel(ComplexMatrix entries);

    static HermitianModel diagonal(std::span<const double> values);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    const ComplexMatrix& entries() const noexcept { return entries_; }

private:
    ComplexMatrix entries_;
};

// A = W diag(a) W^*: ascending nonnegative eigenvalues and a unitary basis
// whose columns are the eigenvectors. Immutable once built.
class Decomposition {
public:
    // Validates sizes, ordering, nonnegativity and W^* W = I within 1e-10.
    Decomposition(Eigen::VectorXd eigenvalues, ComplexMatrix basis);

    std::size_t dim() const noexcept { return static_cast<std::size_t>(eigenvalues_.size()); }
    const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
    const ComplexMatrix& basis() const noexcept { return basis_; }

    // Operator norm of A, i.e. the largest eigenvalue.
    double operator_norm() const;

    ComplexMatrix reconstruct() const;

private:
    Eigen::VectorXd eigenvalues_;
    ComplexMatrix basis_;
};

// Hermitian eigensolve. Eigenvalues >= -1e-10 are accepted and clamped to 0;
// anything more negative raises NotPositive. Each eigenvector is rotated so
// its largest-magnitude component (first one on ties) is real and positive.
Decomposition decompose(const HermitianModel& model);

// W diag(f(a_j)) W^* x.
State apply_multiplier(const Decomposition& decomp, const SpectralFunction& f, const State& x);

// W diag(m) W^* x for precomputed multiplier values m_j, one per eigenvalue.
State apply_diagonal(const Decomposition& decomp, std::span<const std::complex<double>> m,
                     const State& x);

// Periodic 1-D grid of n = 2^p points on a torus of length L, positions
// x_j = -L/2 + j L / n. Mode m (FFT order) has wavenumber xi = 2 pi k / L with
// k = m for m < n/2 and k = m - n otherwise, and symbol a = xi^2.
class PeriodicGrid {
public:
    PeriodicGrid(std::size_t n, double length);

    std::size_t size() const noexcept { return n_; }
    double length() const noexcept { return length_; }
    double spacing() const noexcept { return length_ / static_cast<double>(n_); }
    double position(std::size_t j) const noexcept;
    double wavenumber(std::size_t m) const noexcept;
    double symbol(std::size_t m) const noexcept;

    friend bool operator==(const PeriodicGrid&, const PeriodicGrid&) = default;

private:
    std::size_t n_;
    double length_;
};

// Unitary DFT (1/sqrt(n) both ways), FFT-ordered modes.
ComplexVector unitary_dft(const ComplexVector& x, bool forward);

// Forward transform, multiply mode m by f(symbol(m)), inverse transform.
State fourier_multiplier(const PeriodicGrid& grid, const SpectralFunction& f, const State& x);

// Same with precomputed multiplier values m, one per FFT-ordered mode.
State apply_fourier_diagonal(const PeriodicGrid& grid, std::span<const std::complex<double>> m,
                             const State& x);

}  // namespace fracprop
