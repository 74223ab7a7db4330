#include "fracprop/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fracprop/error.hpp"
#include "fracprop/parallel.hpp"

namespace fracprop {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_time(double t) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        std::ostringstream msg;
        msg << "time must be finite and >= 0, got " << t;
        throw InvalidArgument(msg.str());
    }
}

void require_state(const SpectralModel& model, const State& x) {
    if (model_dim(model) != x.size()) {
        std::ostringstream msg;
        msg << "state has dimension " << x.size() << ", model has " << model_dim(model);
        throw DimensionMismatch(msg.str());
    }
}

}  // namespace

std::size_t model_dim(const SpectralModel& model) {
    return std::visit(Overloaded{[](const Decomposition& d) { return d.dim(); },
                                 [](const PeriodicGrid& g) { return g.size(); }},
                      model);
}

std::vector<double> spectral_values(const SpectralModel& model) {
    return std::visit(
        Overloaded{[](const Decomposition& d) {
                       const Eigen::VectorXd& a = d.eigenvalues();
                       return std::vector<double>(a.data(), a.data() + a.size());
                   },
                   [](const PeriodicGrid& g) {
                       std::vector<double> a(g.size());
                       for (std::size_t m = 0; m < a.size(); ++m) {
                           a[m] = g.symbol(m);
                       }
                       return a;
                   }},
        model);
}

State apply_spectral(const SpectralModel& model, std::span<const std::complex<double>> m,
                     const State& x) {
    return std::visit(
        Overloaded{[&](const Decomposition& d) { return apply_diagonal(d, m, x); },
                   [&](const PeriodicGrid& g) { return apply_fourier_diagonal(g, m, x); }},
        model);
}

State apply_generator(const SpectralModel& model, const State& x) {
    std::vector<double> a = spectral_values(model);
    std::vector<std::complex<double>> m(a.begin(), a.end());
    return apply_spectral(model, m, x);
}

std::vector<std::complex<double>> solution_multipliers(const SolutionFamily& family, double t) {
    require_time(t);
    const std::vector<double> a = spectral_values(family.model());

    std::vector<double> unique = a;
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

    std::vector<std::complex<double>> values(unique.size());
    parallel_for(unique.size(), [&](std::size_t i) {
        try {
            values[i] = ml_ray(RayPoint(family.order(), t, unique[i]), family.options());
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << "solution multiplier failed at spectral value a=" << unique[i] << ", t=" << t
                << ": " << e.what();
            throw EvaluationFailure(msg.str(), unique[i]);
        }
    });

    std::vector<std::complex<double>> out(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        auto it = std::lower_bound(unique.begin(), unique.end(), a[j]);
        out[j] = values[static_cast<std::size_t>(it - unique.begin())];
    }
    return out;
}

State propagate(const SolutionFamily& family, double t, const State& u0) {
    require_state(family.model(), u0);
    const std::vector<std::complex<double>> m = solution_multipliers(family, t);
    return apply_spectral(family.model(), m, u0);
}

State adjoint_propagate(const SolutionFamily& family, double t, const State& u0) {
    require_state(family.model(), u0);
    std::vector<std::complex<double>> m = solution_multipliers(family, t);
    for (auto& v : m) {
        v = std::conj(v);
    }
    return apply_spectral(family.model(), m, u0);
}

std::vector<double> gram_multiplier(const SolutionFamily& family, double t) {
    const std::vector<std::complex<double>> m = solution_multipliers(family, t);
    std::vector<double> out(m.size());
    for (std::size_t j = 0; j < m.size(); ++j) {
        out[j] = std::norm(m[j]);
    }
    return out;
}

State unitary_reference(const SpectralModel& model, double t, const State& u0) {
    require_time(t);
    require_state(model, u0);
    const std::vector<double> a = spectral_values(model);
    std::vector<std::complex<double>> m(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        m[j] = std::exp(std::complex<double>(0.0, -t * a[j]));
    }
    return apply_spectral(model, m, u0);
}

std::vector<AlphaError> alpha_sweep(const SpectralModel& model, std::span<const double> alphas,
                                    double t, const State& u0, const MLOptions& options) {
    require_time(t);
    require_state(model, u0);
    const State reference = unitary_reference(model, t, u0);
    std::vector<AlphaError> out;
    out.reserve(alphas.size());
    for (double alpha : alphas) {
        AlphaError entry;
        entry.alpha = alpha;
        try {
            if (!(alpha > 0.0 && alpha < 1.0)) {
                std::ostringstream msg;
                msg << "sweep order must lie in (0, 1), got " << alpha;
                throw InvalidArgument(msg.str());
            }
            SolutionFamily family(model, FractionalOrder(alpha), options);
            const State u = propagate(family, t, u0);
            entry.error = (u.values() - reference.values()).norm();
        } catch (const Error& e) {
            entry.error = std::numeric_limits<double>::quiet_NaN();
            entry.failure = e.what();
        }
        out.push_back(std::move(entry));
    }
    return out;
}

std::vector<NormSample> norm_trace(const SolutionFamily& family, const State& u0,
                                   std::span<const double> ts) {
    require_state(family.model(), u0);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        require_time(ts[i]);
        if (i > 0 && ts[i] < ts[i - 1]) {
            throw InvalidArgument("norm trace times must be ascending");
        }
    }
    std::vector<NormSample> out(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        out[i] = {ts[i], propagate(family, ts[i], u0).norm()};
    }
    return out;
}

double commutation_defect(const SolutionFamily& family, double t, const State& u0) {
    const State a_after = apply_generator(family.model(), propagate(family, t, u0));
    const State a_before = propagate(family, t, apply_generator(family.model(), u0));
    return (a_after.values() - a_before.values()).norm();
}

State free_propagate(const PeriodicGrid& grid, const FractionalOrder& order, double t,
                     const State& g, const MLOptions& options) {
    return propagate(SolutionFamily(grid, order, options), t, g);
}

Certificate residual_certify(const SolutionFamily& family, const TimeGrid& grid, const State& u0) {
    const auto* decomp = std::get_if<Decomposition>(&family.model());
    if (decomp == nullptr) {
        throw InvalidArgument("residual certification needs a matrix model");
    }
    require_state(family.model(), u0);
    if (grid.size() < 100) {
        throw DegenerateGrid("residual certification needs at least 100 time nodes");
    }

    const std::size_t dim = decomp->dim();
    const std::size_t n = grid.size();
    // channels(j, k) = (W^* u(t_k))_j
    ComplexMatrix channels(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        const State u = propagate(family, grid.node(k), u0);
        channels.col(static_cast<Eigen::Index>(k)) = decomp->basis().adjoint() * u.values();
    }

    Certificate cert;
    cert.skipped_nodes = residual_skip(n);
    cert.channel_residuals.resize(dim);
    for (std::size_t j = 0; j < dim; ++j) {
        std::vector<std::complex<double>> path(n);
        for (std::size_t k = 0; k < n; ++k) {
            path[k] = channels(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
        }
        const double omega = decomp->eigenvalues()[static_cast<Eigen::Index>(j)];
        cert.channel_residuals[j] =
            equation_residual(family.order(), omega, SampledPath(grid, std::move(path)));
        cert.residual = std::max(cert.residual, cert.channel_residuals[j]);
    }
    return cert;
}

}  // namespace fracprop
