#include "fracprop/fracops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fracprop/error.hpp"
#include "fracprop/parallel.hpp"

namespace fracprop {

namespace {

void require_positive_order(double alpha, const char* name) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        std::ostringstream msg;
        msg << name << " must be positive and finite, got " << alpha;
        throw InvalidArgument(msg.str());
    }
}

}  // namespace

TimeGrid::TimeGrid(double h, std::size_t n) : h_(h), n_(n) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw InvalidArgument("time grid step must be positive and finite");
    }
    if (n < 2) {
        throw DegenerateGrid("time grid needs at least 2 nodes");
    }
}

TimeGrid TimeGrid::covering(double t_end, double h) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
        throw InvalidArgument("time horizon must be positive and finite");
    }
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw InvalidArgument("time grid step must be positive and finite");
    }
    auto steps = static_cast<std::size_t>(std::llround(t_end / h));
    return TimeGrid(h, steps + 1);
}

SampledPath::SampledPath(TimeGrid grid, std::vector<std::complex<double>> values)
    : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        std::ostringstream msg;
        msg << "sampled path has " << values_.size() << " values for a grid of " << grid_.size()
            << " nodes";
        throw DimensionMismatch(msg.str());
    }
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!std::isfinite(values_[k].real()) || !std::isfinite(values_[k].imag())) {
            std::ostringstream msg;
            msg << "sampled path value at node " << k << " is not finite";
            throw InvalidArgument(msg.str());
        }
    }
}

double g_weight(double alpha, double t) {
    require_positive_order(alpha, "g_alpha order");
    if (!(t > 0.0)) {
        throw InvalidArgument("g_alpha is defined for t > 0");
    }
    return std::pow(t, alpha - 1.0) / std::tgamma(alpha);
}

std::vector<double> l1_weights(double alpha, std::size_t count) {
    std::vector<double> b(count);
    const double p = 1.0 - alpha;
    for (std::size_t j = 0; j < count; ++j) {
        const double jd = static_cast<double>(j);
        b[j] = std::pow(jd + 1.0, p) - (j == 0 ? 0.0 : std::pow(jd, p));
    }
    return b;
}

SampledPath rl_integral(double alpha, const SampledPath& u) {
    require_positive_order(alpha, "integral order");
    const TimeGrid& grid = u.grid();
    const std::size_t n = grid.size();
    const double ap1 = alpha + 1.0;

    // Interior weights depend only on the lag m = k - j >= 1.
    std::vector<double> lag(n, 0.0);
    for (std::size_t m = 1; m < n; ++m) {
        const double md = static_cast<double>(m);
        lag[m] = std::pow(md + 1.0, ap1) - 2.0 * std::pow(md, ap1) + std::pow(md - 1.0, ap1);
    }

    const double scale = std::pow(grid.h(), alpha) / std::tgamma(alpha + 2.0);
    std::vector<std::complex<double>> out(n, 0.0);
    parallel_for(n - 1, [&](std::size_t idx) {
        const std::size_t k = idx + 1;
        const double kd = static_cast<double>(k);
        const double first = std::pow(kd - 1.0, ap1) - (kd - 1.0 - alpha) * std::pow(kd, alpha);
        std::complex<double> acc = first * u[0];
        for (std::size_t j = 1; j < k; ++j) {
            acc += lag[k - j] * u[j];
        }
        acc += u[k];
        out[k] = scale * acc;
    });
    return SampledPath(grid, std::move(out));
}

CaputoPath caputo_l1(const FractionalOrder& order, const SampledPath& u) {
    const TimeGrid& grid = u.grid();
    const std::size_t n = grid.size();
    if (n < 2) {
        throw DegenerateGrid("Caputo L1 scheme needs at least 2 nodes");
    }
    const double alpha = order.alpha();
    const std::vector<double> b = l1_weights(alpha, n);
    std::vector<std::complex<double>> diff(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) {
        diff[k] = u[k] - u[k - 1];
    }

    const double scale = std::pow(grid.h(), -alpha) / std::tgamma(2.0 - alpha);
    CaputoPath out{grid, std::vector<std::complex<double>>(n)};
    out.values[0] = {std::numeric_limits<double>::quiet_NaN(),
                     std::numeric_limits<double>::quiet_NaN()};
    parallel_for(n - 1, [&](std::size_t idx) {
        const std::size_t k = idx + 1;
        std::complex<double> acc = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            acc += b[j] * diff[k - j];
        }
        out.values[k] = scale * acc;
    });
    return out;
}

std::size_t residual_skip(std::size_t n) {
    return (n + 9) / 10;
}

double equation_residual(const FractionalOrder& order, std::complex<double> omega,
                         const SampledPath& u) {
    const std::size_t n = u.size();
    if (n < 4) {
        throw DegenerateGrid("equation residual needs at least 4 nodes");
    }
    const CaputoPath d = caputo_l1(order, u);
    const std::complex<double> rhs = order.phase() * omega;
    double worst = 0.0;
    for (std::size_t k = std::max<std::size_t>(residual_skip(n), 1); k < n; ++k) {
        worst = std::max(worst, std::abs(d.values[k] - rhs * u[k]));
    }
    return worst;
}

double semigroup_defect(double alpha, double beta, const SampledPath& u) {
    require_positive_order(alpha, "alpha");
    require_positive_order(beta, "beta");
    const SampledPath direct = rl_integral(alpha + beta, u);
    const SampledPath composed = rl_integral(alpha, rl_integral(beta, u));
    double worst = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        worst = std::max(worst, std::abs(direct[k] - composed[k]));
    }
    return worst;
}

}  // namespace fracprop
