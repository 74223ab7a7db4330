#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "fracprop/mlf.hpp"

namespace fracprop {

// Uniform grid t_k = k h, k = 0..n-1. Always starts at 0, where the memory of
// the fractional operators begins.
class TimeGrid {
public:
    TimeGrid(double h, std::size_t n);

    // Grid with step h covering [0, t_end]: n = round(t_end / h) + 1.
    static TimeGrid covering(double t_end, double h);

    double h() const noexcept { return h_; }
    std::size_t size() const noexcept { return n_; }
    double node(std::size_t k) const noexcept { return static_cast<double>(k) * h_; }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    double h_;
    std::size_t n_;
};

// Complex samples u(t_k) of a path on a TimeGrid; finite, length = grid size.
class SampledPath {
public:
    SampledPath(TimeGrid grid, std::vector<std::complex<double>> values);

    const TimeGrid& grid() const noexcept { return grid_; }
    const std::vector<std::complex<double>>& values() const noexcept { return values_; }
    std::complex<double> operator[](std::size_t k) const { return values_[k]; }
    std::size_t size() const noexcept { return values_.size(); }

    template <class F>
    static SampledPath sample(const TimeGrid& grid, F&& f) {
        std::vector<std::complex<double>> v(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) {
            v[k] = f(grid.node(k));
        }
        return SampledPath(grid, std::move(v));
    }

private:
    TimeGrid grid_;
    std::vector<std::complex<double>> values_;
};

// Output of the discrete Caputo derivative. values[0] is NaN: the L1 stencil
// defines nothing at t = 0.
struct CaputoPath {
    TimeGrid grid;
    std::vector<std::complex<double>> values;
};

// g_alpha(t) = t^{alpha-1} / Gamma(alpha) for alpha > 0, t > 0.
double g_weight(double alpha, double t);

// L1 weights b_j = (j+1)^{1-alpha} - j^{1-alpha}, j = 0..count-1.
std::vector<double> l1_weights(double alpha, std::size_t count);

// J^alpha u at every node by the product trapezoidal rule (piecewise-linear
// interpolation of u, kernel integrated exactly). Node 0 is 0.
SampledPath rl_integral(double alpha, const SampledPath& u);

// L1 scheme for the Caputo derivative:
//   D u(t_k) ~ h^{-alpha} / Gamma(2 - alpha) sum_{j<k} b_j (u_{k-j} - u_{k-j-1}).
// At alpha = 1 the weights collapse to b_0 = 1 and this is the backward difference.
CaputoPath caputo_l1(const FractionalOrder& order, const SampledPath& u);

// Number of leading nodes equation_residual ignores: ceil(n / 10).
std::size_t residual_skip(std::size_t n);

// max over k >= residual_skip(n) of |D u(t_k) - (-i)^alpha omega u(t_k)|.
// Requires n >= 4 (DegenerateGrid otherwise).
double equation_residual(const FractionalOrder& order, std::complex<double> omega,
                         const SampledPath& u);

// max over nodes of |J^{alpha+beta} u - J^alpha J^beta u|.
double semigroup_defect(double alpha, double beta, const SampledPath& u);

}  // namespace fracprop
