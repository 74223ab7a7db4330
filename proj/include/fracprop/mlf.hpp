#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

namespace fracprop {

// Fractional order alpha in (0, 1] together with the phase (-i)^alpha.
class FractionalOrder {
public:
    explicit FractionalOrder(double alpha);

    double alpha() const noexcept { return alpha_; }

    // e^{-i alpha pi / 2}; exactly (0, -1) at alpha = 1.
    std::complex<double> phase() const noexcept { return phase_; }

    bool is_unit() const noexcept { return alpha_ == 1.0; }

    friend bool operator==(const FractionalOrder&, const FractionalOrder&) = default;

private:
    double alpha_;
    std::complex<double> phase_;
};

enum class MLMethod { Series, Integral, Exact };

std::string_view to_string(MLMethod method);

// A Mittag-Leffler evaluation. err_est is a claimed bound on the absolute
// error of value (truncation plus floating-point rounding).
struct MLValue {
    std::complex<double> value;
    MLMethod method = MLMethod::Series;
    double err_est = 0.0;
};

// The point z = (-i)^alpha t^alpha omega on the ray arg z = -alpha pi / 2.
class RayPoint {
public:
    RayPoint(FractionalOrder order, double t, double omega);

    const FractionalOrder& order() const noexcept { return order_; }
    double t() const noexcept { return t_; }
    double omega() const noexcept { return omega_; }

    std::complex<double> argument() const;

private:
    FractionalOrder order_;
    double t_;
    double omega_;
};

struct MLOptions {
    double tol = 1e-13;
    // Largest |z| handed to the power series by ml_eval.
    double series_radius = 5.0;
    // ml_eval also rejects a series result whose sum of term magnitudes
    // exceeds max_cancellation * max(1, |sum|).
    double max_cancellation = 1e3;
    std::size_t series_term_cap = 2000;
    double pole_guard = 1e-12;
    int max_depth = 48;
};

// Partial sum of sum_k z^k / Gamma(alpha k + 1). Stops once three consecutive
// terms fall below tol * max(1, |partial sum|). err_est covers the last three
// terms plus a rounding bound proportional to the sum of term magnitudes.
// Throws NonConvergence past term_cap terms or on overflow.
MLValue ml_series(const FractionalOrder& order, std::complex<double> z, double tol,
                  std::size_t term_cap = 2000);

// K_alpha(r, z) = -e^{-r^{1/alpha}} z sin(pi alpha) / (pi alpha (r^2 - 2 r z cos(pi alpha) + z^2)).
// Throws PoleProximity when |denominator| < pole_guard * (r^2 + |z|^2).
std::complex<double> ml_kernel(const FractionalOrder& order, double r, std::complex<double> z,
                               double pole_guard = 1e-12);

// (1/alpha) exp(z^{1/alpha}) with the principal branch of z^{1/alpha}.
std::complex<double> ml_exponential_term(const FractionalOrder& order, std::complex<double> z);

// E_alpha(z) = int_0^inf K_alpha(r, z) dr + (1/alpha) e^{z^{1/alpha}} for
// |arg z| < pi alpha; for |arg z| > pi alpha the exponential term is absent.
// The integral is truncated at R = (ln(C/tol))^alpha with the tail bound
// folded into err_est. Throws PoleProximity on the boundary |arg z| = pi alpha
// and QuadratureFailure when refinement exceeds the depth cap.
MLValue ml_integral(const FractionalOrder& order, std::complex<double> z, double tol,
                    const MLOptions& options = {});

// Dispatcher: exact exponential at alpha = 1, the series for small |z| with
// bounded cancellation, the integral representation otherwise. Falls back to
// the other backend if the preferred one fails.
MLValue ml_eval(const FractionalOrder& order, std::complex<double> z, const MLOptions& options = {});

// Like ml_eval at point.argument(), but evaluates the exponential term of the
// integral representation as (1/alpha) e^{-i t omega^{1/alpha}} directly, so
// its modulus is exactly 1/alpha however large t omega^{1/alpha} gets.
MLValue ml_ray_eval(const RayPoint& point, const MLOptions& options = {});

// E_alpha((-it)^alpha omega); exactly 1 at t = 0.
std::complex<double> ml_ray(const RayPoint& point, const MLOptions& options = {});

struct SupSweep {
    double sup = 0.0;
    double argmax = 0.0;
};

// max |E_alpha((-i)^alpha omega)| over omega = 0 and n log-spaced points in
// [1e-3 min(1, omega_max), omega_max], with the maximiser refined by golden
// section between its grid neighbours. Failures raise EvaluationFailure
// carrying the offending omega.
SupSweep ml_sup_sweep(const FractionalOrder& order, double omega_max, std::size_t n,
                      const MLOptions& options = {});

}  // namespace fracprop
