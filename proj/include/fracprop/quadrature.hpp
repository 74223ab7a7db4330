#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

#include "fracprop/error.hpp"

namespace fracprop::quad {

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Newton iteration on P_n from the Chebyshev initial guesses; nodes ascend.
GaussLegendreRule gauss_legendre(std::size_t n);

// Default panel rule shared by the adaptive integrator (12 points).
const GaussLegendreRule& default_rule();

struct QuadResult {
    std::complex<double> value;
    double err_est = 0.0;      // sum over accepted panels of |coarse - fine|
    double abs_integral = 0.0; // approximation of the integral of |f|, for roundoff bounds
    std::size_t panels = 0;
};

struct AdaptiveOptions {
    double abs_tol = 1e-12;
    int max_depth = 48;
};

namespace detail {

template <class F>
std::complex<double> apply_rule(const GaussLegendreRule& rule, F& f, double a, double b,
                                double& abs_sum) {
    double mid = 0.5 * (a + b);
    double half = 0.5 * (b - a);
    std::complex<double> sum = 0.0;
    double mag = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        std::complex<double> y = f(mid + half * rule.nodes[i]);
        sum += rule.weights[i] * y;
        mag += rule.weights[i] * std::abs(y);
    }
    abs_sum = mag * half;
    return sum * half;
}

template <class F>
void refine(const GaussLegendreRule& rule, F& f, double a, double b, std::complex<double> coarse,
            double tol_density, int depth, const AdaptiveOptions& opt, QuadResult& out) {
    double mid = 0.5 * (a + b);
    double abs_left = 0.0;
    double abs_right = 0.0;
    std::complex<double> left = apply_rule(rule, f, a, mid, abs_left);
    std::complex<double> right = apply_rule(rule, f, mid, b, abs_right);
    std::complex<double> fine = left + right;
    double diff = std::abs(fine - coarse);
    double panel_tol = tol_density * (b - a);
    double roundoff = 8.0 * std::numeric_limits<double>::epsilon() * (abs_left + abs_right);
    if (diff <= std::max(panel_tol, roundoff)) {
        out.value += fine;
        out.err_est += diff;
        out.abs_integral += abs_left + abs_right;
        out.panels += 2;
        return;
    }
    if (depth >= opt.max_depth) {
        std::ostringstream msg;
        msg << "adaptive quadrature exceeded depth " << opt.max_depth << " on [" << a << ", "
            << b << "] (panel error " << diff << ")";
        throw QuadratureFailure(msg.str());
    }
    refine(rule, f, a, mid, left, tol_density, depth + 1, opt, out);
    refine(rule, f, mid, b, right, tol_density, depth + 1, opt, out);
}

}  // namespace detail

// Adaptive Gauss-Legendre integration of a complex integrand over the
// consecutive intervals defined by `breaks` (ascending, at least two points).
// Each panel is compared against its two halves; the panel is accepted when
// the difference is below its share of abs_tol, proportional to its length.
// Panels are summed left to right so the result is deterministic.
template <class F>
QuadResult integrate(F&& f, std::span<const double> breaks, const AdaptiveOptions& opt = {}) {
    if (breaks.size() < 2) {
        throw InvalidArgument("quadrature needs at least one interval");
    }
    const GaussLegendreRule& rule = default_rule();
    double total = breaks.back() - breaks.front();
    if (!(total > 0.0)) {
        throw InvalidArgument("quadrature interval has non-positive length");
    }
    QuadResult out;
    double tol_density = opt.abs_tol / total;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        double a = breaks[i];
        double b = breaks[i + 1];
        if (!(b > a)) {
            continue;
        }
        double coarse_abs = 0.0;
        std::complex<double> coarse = detail::apply_rule(rule, f, a, b, coarse_abs);
        detail::refine(rule, f, a, b, coarse, tol_density, 0, opt, out);
    }
    return out;
}

}  // namespace fracprop::quad
