#include "fracprop/mlf.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "fracprop/error.hpp"
#include "fracprop/parallel.hpp"
#include "fracprop/quadrature.hpp"

namespace fracprop {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = std::numbers::pi;

struct SeriesSum {
    std::complex<double> value;
    double tail = 0.0;
    double magnitude_sum = 0.0;
    std::size_t terms = 0;

    double err_est() const {
        return tail + kEps * static_cast<double>(terms + 8) * magnitude_sum;
    }
};

SeriesSum sum_series(double alpha, std::complex<double> z, double tol, std::size_t term_cap) {
    SeriesSum out;
    out.value = 1.0;
    out.magnitude_sum = 1.0;
    out.terms = 1;
    if (z == 0.0) {
        return out;
    }

    const double log_abs_z = std::log(std::abs(z));
    const double arg_z = std::arg(z);
    std::complex<double> power = 1.0;  // z^k while small enough to form directly
    bool direct = true;
    std::array<double, 3> recent{};
    int small_run = 0;

    for (std::size_t k = 1;; ++k) {
        if (k >= term_cap) {
            std::ostringstream msg;
            msg << "Mittag-Leffler series did not converge within " << term_cap
                << " terms (alpha=" << alpha << ", |z|=" << std::abs(z) << ")";
            throw NonConvergence(msg.str());
        }
        const double kd = static_cast<double>(k);
        const double gamma_arg = alpha * kd + 1.0;
        std::complex<double> term;
        if (direct) {
            power *= z;
            if (gamma_arg < 170.0 && std::isfinite(std::abs(power))) {
                term = power / std::tgamma(gamma_arg);
            } else {
                direct = false;
            }
        }
        if (!direct) {
            double log_mag = kd * log_abs_z - std::lgamma(gamma_arg);
            term = std::polar(std::exp(log_mag), kd * arg_z);
        }

        const double mag = std::abs(term);
        out.value += term;
        out.magnitude_sum += mag;
        out.terms = k + 1;
        if (!std::isfinite(out.magnitude_sum) || !std::isfinite(std::abs(out.value))) {
            std::ostringstream msg;
            msg << "Mittag-Leffler series overflowed at term " << k << " (alpha=" << alpha
                << ", |z|=" << std::abs(z) << ")";
            throw NonConvergence(msg.str());
        }

        recent[k % 3] = mag;
        if (mag < tol * std::max(1.0, std::abs(out.value))) {
            if (++small_run == 3) {
                out.tail = recent[0] + recent[1] + recent[2];
                return out;
            }
        } else {
            small_run = 0;
        }
    }
}

void require_tol(double tol) {
    if (!(tol > 0.0) || !std::isfinite(tol)) {
        throw InvalidArgument("tolerance must be positive and finite");
    }
}

// Distance from w to the half line [0, inf).
double distance_to_half_line(std::complex<double> w) {
    return w.real() >= 0.0 ? std::abs(w.imag()) : std::abs(w);
}

// Integral part and explicit term evaluated separately; explicit may be
// supplied by the caller (ray evaluation).
MLValue integral_impl(const FractionalOrder& order, std::complex<double> z, double tol,
                      const MLOptions& options,
                      std::optional<std::complex<double>> explicit_override) {
    require_tol(tol);
    if (z == 0.0) {
        throw InvalidArgument("integral representation requires z != 0");
    }
    const double alpha = order.alpha();
    const double abs_z = std::abs(z);

    if (order.is_unit()) {
        // sin(pi) = 0: the kernel vanishes identically.
        std::complex<double> e = explicit_override.value_or(std::exp(z));
        return {e, MLMethod::Integral, kEps * std::abs(e) * (1.0 + abs_z)};
    }

    const std::complex<double> w1 = z * std::polar(1.0, kPi * alpha);
    const std::complex<double> w2 = z * std::polar(1.0, -kPi * alpha);
    const double floor0 = distance_to_half_line(w1) * distance_to_half_line(w2);
    if (floor0 < options.pole_guard * abs_z * abs_z) {
        std::ostringstream msg;
        msg << "kernel pole on the integration path: |arg z| = pi alpha (alpha=" << alpha
            << ", z=" << z << ")";
        throw PoleProximity(msg.str());
    }

    const double sin_pa = std::sin(kPi * alpha);
    const double c_bound = abs_z * sin_pa / (kPi * alpha * floor0);
    const double log_arg = std::max(std::log(2.0 * c_bound / tol), 1.0);
    const double cutoff = std::max(1.0, std::pow(log_arg, alpha));
    const double tail = c_bound * alpha * std::pow(cutoff, 1.0 - 1.0 / alpha) *
                        std::exp(-std::pow(cutoff, 1.0 / alpha));

    std::vector<double> breaks{0.0, cutoff};
    for (double b : {abs_z, w1.real(), w2.real()}) {
        if (b > 0.0 && b < cutoff) {
            breaks.push_back(b);
        }
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    auto kernel = [&](double r) { return ml_kernel(order, r, z, options.pole_guard); };
    quad::QuadResult q;
    try {
        q = quad::integrate(kernel, breaks, {0.5 * tol, options.max_depth});
    } catch (const PoleProximity& e) {
        throw QuadratureFailure(std::string("quadrature reached a kernel pole: ") + e.what());
    }

    std::complex<double> explicit_term = 0.0;
    double explicit_err = 0.0;
    const double sector = kPi * alpha;
    if (std::abs(std::arg(z)) < sector) {
        explicit_term = explicit_override.value_or(ml_exponential_term(order, z));
        // |z|^{1/alpha} carries a relative rounding error of a few ulps, which
        // becomes an absolute error in the phase (and, off the ray, the modulus).
        const double exponent = std::pow(abs_z, 1.0 / alpha);
        explicit_err = 4.0 * kEps * std::abs(explicit_term) * (1.0 + exponent);
    }

    MLValue out;
    out.value = q.value + explicit_term;
    out.method = MLMethod::Integral;
    out.err_est = q.err_est + tail + 8.0 * kEps * q.abs_integral + explicit_err;
    return out;
}

MLValue eval_impl(const FractionalOrder& order, std::complex<double> z, const MLOptions& options,
                  std::optional<std::complex<double>> explicit_override) {
    if (order.is_unit()) {
        return {explicit_override.value_or(std::exp(z)), MLMethod::Exact, 0.0};
    }
    if (z == 0.0) {
        return {1.0, MLMethod::Series, 0.0};
    }

    std::optional<SeriesSum> series;
    std::optional<NonConvergence> series_error;
    if (std::abs(z) <= options.series_radius) {
        try {
            series = sum_series(order.alpha(), z, options.tol, options.series_term_cap);
        } catch (const NonConvergence& e) {
            series_error = e;
        }
        if (series && series->magnitude_sum <=
                          options.max_cancellation * std::max(1.0, std::abs(series->value))) {
            return {series->value, MLMethod::Series, series->err_est()};
        }
    }

    try {
        return integral_impl(order, z, options.tol, options, explicit_override);
    } catch (const Error& integral_error) {
        if (series) {
            return {series->value, MLMethod::Series, series->err_est()};
        }
        std::ostringstream msg;
        msg << "both Mittag-Leffler backends failed at z=" << z << ": integral: "
            << integral_error.what();
        if (series_error) {
            msg << "; series: " << series_error->what();
        }
        throw QuadratureFailure(msg.str());
    }
}

double abs_ray(const FractionalOrder& order, double omega, const MLOptions& options) {
    try {
        return std::abs(ml_ray(RayPoint(order, 1.0, omega), options));
    } catch (const EvaluationFailure&) {
        throw;
    } catch (const Error& e) {
        std::ostringstream msg;
        msg << "bound sweep failed at omega=" << omega << ": " << e.what();
        throw EvaluationFailure(msg.str(), omega);
    }
}

}  // namespace

FractionalOrder::FractionalOrder(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        std::ostringstream msg;
        msg << "fractional order must lie in (0, 1], got " << alpha;
        throw InvalidArgument(msg.str());
    }
    phase_ = alpha == 1.0 ? std::complex<double>(0.0, -1.0) : std::polar(1.0, -alpha * kPi / 2.0);
}

std::string_view to_string(MLMethod method) {
    switch (method) {
        case MLMethod::Series:
            return "series";
        case MLMethod::Integral:
            return "integral";
        case MLMethod::Exact:
            return "exact";
    }
    return "unknown";
}

RayPoint::RayPoint(FractionalOrder order, double t, double omega)
    : order_(order), t_(t), omega_(omega) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw InvalidArgument("ray point requires finite t >= 0");
    }
    if (!(omega >= 0.0) || !std::isfinite(omega)) {
        throw InvalidArgument("ray point requires finite omega >= 0");
    }
}

std::complex<double> RayPoint::argument() const {
    if (order_.is_unit()) {
        return order_.phase() * (t_ * omega_);
    }
    return order_.phase() * (std::pow(t_, order_.alpha()) * omega_);
}

MLValue ml_series(const FractionalOrder& order, std::complex<double> z, double tol,
                  std::size_t term_cap) {
    require_tol(tol);
    SeriesSum s = sum_series(order.alpha(), z, tol, term_cap);
    return {s.value, MLMethod::Series, s.err_est()};
}

std::complex<double> ml_kernel(const FractionalOrder& order, double r, std::complex<double> z,
                               double pole_guard) {
    if (!(r > 0.0)) {
        throw InvalidArgument("kernel requires r > 0");
    }
    if (z == 0.0) {
        throw InvalidArgument("kernel requires z != 0");
    }
    const double alpha = order.alpha();
    // r^2 - 2 r z cos(pi alpha) + z^2 = (r - z e^{i pi alpha}) (r - z e^{-i pi alpha})
    const std::complex<double> den =
        (r - z * std::polar(1.0, kPi * alpha)) * (r - z * std::polar(1.0, -kPi * alpha));
    if (std::abs(den) < pole_guard * (r * r + std::norm(z))) {
        std::ostringstream msg;
        msg << "kernel denominator vanishes (alpha=" << alpha << ", r=" << r << ", z=" << z
            << ")";
        throw PoleProximity(msg.str());
    }
    const double decay = std::exp(-std::pow(r, 1.0 / alpha));
    return -decay * z * std::sin(kPi * alpha) / (kPi * alpha * den);
}

std::complex<double> ml_exponential_term(const FractionalOrder& order, std::complex<double> z) {
    const double alpha = order.alpha();
    return std::exp(std::pow(z, 1.0 / alpha)) / alpha;
}

MLValue ml_integral(const FractionalOrder& order, std::complex<double> z, double tol,
                    const MLOptions& options) {
    return integral_impl(order, z, tol, options, std::nullopt);
}

MLValue ml_eval(const FractionalOrder& order, std::complex<double> z, const MLOptions& options) {
    return eval_impl(order, z, options, std::nullopt);
}

MLValue ml_ray_eval(const RayPoint& point, const MLOptions& options) {
    const FractionalOrder& order = point.order();
    if (point.t() == 0.0 || point.omega() == 0.0) {
        return {1.0, order.is_unit() ? MLMethod::Exact : MLMethod::Series, 0.0};
    }
    // On the ray z^{1/alpha} = -i t omega^{1/alpha} exactly.
    const double alpha = order.alpha();
    const double exponent = point.t() * std::pow(point.omega(), 1.0 / alpha);
    const std::complex<double> explicit_term = std::polar(1.0, -exponent) / alpha;
    return eval_impl(order, point.argument(), options, explicit_term);
}

std::complex<double> ml_ray(const RayPoint& point, const MLOptions& options) {
    return ml_ray_eval(point, options).value;
}

SupSweep ml_sup_sweep(const FractionalOrder& order, double omega_max, std::size_t n,
                      const MLOptions& options) {
    if (n < 2) {
        throw InvalidArgument("bound sweep needs n >= 2");
    }
    if (!(omega_max > 0.0) || !std::isfinite(omega_max)) {
        throw InvalidArgument("bound sweep needs finite omega_max > 0");
    }

    const double lo = 1e-3 * std::min(1.0, omega_max);
    const double log_lo = std::log(lo);
    const double log_step = (std::log(omega_max) - log_lo) / static_cast<double>(n - 1);
    std::vector<double> omegas(n + 1);
    omegas[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        omegas[i + 1] = i + 1 == n ? omega_max : std::exp(log_lo + log_step * static_cast<double>(i));
    }

    std::vector<double> moduli(omegas.size());
    parallel_for(omegas.size(), [&](std::size_t i) { moduli[i] = abs_ray(order, omegas[i], options); });

    std::size_t best = 0;
    for (std::size_t i = 1; i < moduli.size(); ++i) {
        if (moduli[i] > moduli[best]) {
            best = i;
        }
    }
    SupSweep out{moduli[best], omegas[best]};

    // Golden-section refinement between the grid neighbours of the maximiser.
    if (best >= 1 && best + 1 < omegas.size() && !order.is_unit()) {
        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double a = omegas[best - 1];
        double b = omegas[best + 1];
        double c = b - inv_phi * (b - a);
        double d = a + inv_phi * (b - a);
        double fc = abs_ray(order, c, options);
        double fd = abs_ray(order, d, options);
        for (int iter = 0; iter < 60 && (b - a) > 1e-12 * b; ++iter) {
            if (fc > fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = abs_ray(order, c, options);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = abs_ray(order, d, options);
            }
        }
        double cand = fc > fd ? c : d;
        double fcand = std::max(fc, fd);
        if (fcand > out.sup) {
            out = {fcand, cand};
        }
    }
    return out;
}

}  // namespace fracprop
