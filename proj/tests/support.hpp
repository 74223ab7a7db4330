#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include "fracprop/propagator.hpp"
#include "fracprop/spectral.hpp"

namespace fracprop::testing {

// Uniform in [-1, 1) from the raw 64-bit stream; identical on every platform.
inline double uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
}

inline ComplexVector random_vector(std::size_t n, std::mt19937_64& rng) {
    ComplexVector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double re = uniform(rng);
        v[i] = {re, uniform(rng)};
    }
    return v;
}

inline ComplexMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
    ComplexMatrix b(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
        b.col(i) = random_vector(n, rng);
    }
    ComplexMatrix h = 0.5 * (b + b.adjoint());
    return h;
}

// B B^* / n: positive semidefinite with eigenvalues of order one.
inline ComplexMatrix random_psd(std::size_t n, std::mt19937_64& rng) {
    ComplexMatrix b(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
        b.col(i) = random_vector(n, rng);
    }
    ComplexMatrix a = b * b.adjoint() / static_cast<double>(n);
    // exact symmetry, so the Hermitian check sees no rounding asymmetry
    ComplexMatrix h = 0.5 * (a + a.adjoint());
    return h;
}

// U_alpha(t) assembled column by column from propagated basis vectors.
inline ComplexMatrix materialize(const SolutionFamily& family, double t, bool adjoint = false) {
    const auto n = static_cast<Eigen::Index>(model_dim(family.model()));
    ComplexMatrix u(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        ComplexVector e = ComplexVector::Zero(n);
        e[j] = 1.0;
        const State col = adjoint ? adjoint_propagate(family, t, State(e))
                                  : propagate(family, t, State(e));
        u.col(j) = col.values();
    }
    return u;
}

// exp(-(x-c)^2 / (2 w^2)) evolved by i u_t = -u_xx on the real line.
inline std::complex<double> dispersive_gaussian(double x, double c, double w, double t) {
    const std::complex<double> s2(w * w, 2.0 * t);
    const double d = x - c;
    return std::sqrt(w * w / s2) * std::exp(-d * d / (2.0 * s2));
}

}  // namespace fracprop::testing
