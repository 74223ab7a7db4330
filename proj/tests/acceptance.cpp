// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fracprop/error.hpp"
#include "fracprop/fracops.hpp"
#include "fracprop/mlf.hpp"
#include "fracprop/propagator.hpp"
#include "fracprop/spectral.hpp"
#include "support.hpp"

using namespace fracprop;
using cd = std::complex<double>;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

State basis(std::size_t n, std::size_t i) {
    ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(n));
    v[static_cast<Eigen::Index>(i)] = 1.0;
    return State(v);
}

Decomposition diag_model(std::vector<double> a) {
    return decompose(HermitianModel::diagonal(a));
}

State gaussian(const PeriodicGrid& grid, double w) {
    ComplexVector g(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double x = grid.position(j);
        g[static_cast<Eigen::Index>(j)] = std::exp(-x * x / (2 * w * w));
    }
    return State(g);
}

Verdict backend_agreement() {
    const MLOptions opts;
    int held = 0;
    int informative = 0;
    int nonconvergent = 0;
    int violated = 0;
    std::string worst;
    for (double a : {0.3, 0.5, 0.7, 0.9}) {
        const FractionalOrder o(a);
        int failures = 0;
        for (int i = 0; i < 50; ++i) {
            const double w = 1.0 + 9.0 * i / 49.0;
            const cd z = RayPoint(o, 1.0, w).argument();
            const MLValue q = ml_integral(o, z, opts.tol, opts);
            try {
                const MLValue s = ml_series(o, z, opts.tol, opts.series_term_cap);
                const double bound = s.err_est + q.err_est + 1e-9;
                if (std::abs(s.value - q.value) <= bound) {
                    ++held;
                    informative += bound <= 1e-6 ? 1 : 0;
                } else {
                    ++violated;
                    ++failures;
                }
            } catch (const NonConvergence&) {
                ++nonconvergent;
                ++failures;
            }
        }
        if (failures > 0) {
            worst += fmt(" alpha=%g:%d", a, failures);
        }
    }
    Verdict v;
    v.pass = held == 200;
    v.detail = fmt("held %d/200 (bound <= 1e-6 on %d), series non-convergent %d, violated %d", held,
                   informative, nonconvergent, violated);
    if (!worst.empty()) {
        v.detail += "; failures by order:" + worst;
    }
    return v;
}

Verdict boundedness() {
    Verdict v{true, ""};
    for (double a : {0.3, 0.5, 0.7, 0.9, 1.0}) {
        const FractionalOrder o(a);
        const SupSweep s1 = ml_sup_sweep(o, 1e6, 10000);
        const SupSweep s2 = ml_sup_sweep(o, 2e6, 10000);
        const double change = std::abs(s2.sup - s1.sup) / s1.sup;
        bool ok = std::isfinite(s1.sup) && std::isfinite(s2.sup) && change < 0.01;
        if (a == 1.0) {
            ok = ok && std::abs(s1.sup - 1.0) <= 1e-12 && std::abs(s2.sup - 1.0) <= 1e-12;
        }
        v.pass = v.pass && ok;
        v.detail += fmt("%salpha=%g sup=%.6f change=%.1e", v.detail.empty() ? "" : ", ", a, s1.sup,
                        change);
    }
    return v;
}

Verdict residual_certificate() {
    Verdict v{true, ""};
    for (double a : {0.5, 0.7}) {
        const SolutionFamily f(diag_model({1.0}), FractionalOrder(a));
        const Certificate c1 = residual_certify(f, TimeGrid::covering(1.0, 1e-3), basis(1, 0));
        const Certificate c2 = residual_certify(f, TimeGrid::covering(1.0, 5e-4), basis(1, 0));
        const double rate = std::log2(c1.residual / c2.residual);

        const FractionalOrder o(a);
        const TimeGrid g = TimeGrid::covering(1.0, 1e-3);
        const SampledPath wrong = SampledPath::sample(
            g, [&](double t) { return std::conj(ml_ray(RayPoint(o, t, 1.0))); });
        const double control = equation_residual(o, 1.0, wrong);

        const bool ok = c1.residual < 0.05 && rate >= 1.3 && control >= 10.0 * c1.residual;
        v.pass = v.pass && ok;
        v.detail += fmt("%salpha=%g residual=%.3e rate=%.3f wrong-phase x%.0f",
                        v.detail.empty() ? "" : ", ", a, c1.residual, rate,
                        control / c1.residual);
    }
    return v;
}

struct RandomModel {
    Decomposition model;
    FractionalOrder order;
    State u0;
    State y;
};

std::vector<RandomModel> random_models() {
    std::mt19937_64 rng(20240601);
    std::vector<RandomModel> out;
    const double orders[] = {0.3, 0.5, 0.7, 0.9};
    for (std::size_t k = 0; k < 20; ++k) {
        const std::size_t n = 1 + (k * 127) / 19;
        const ComplexMatrix a = testing::random_psd(n, rng);
        State u0(testing::random_vector(n, rng));
        State y(testing::random_vector(n, rng));
        out.push_back({decompose(HermitianModel(a)), FractionalOrder(orders[k % 4]), u0, y});
    }
    return out;
}

Verdict identity_and_commutation(const std::vector<RandomModel>& models) {
    double worst_identity = 0.0;
    double worst_commutation = 0.0;
    bool ok = true;
    for (const RandomModel& m : models) {
        const SolutionFamily f(m.model, m.order);
        const State at0 = propagate(f, 0.0, m.u0);
        const double id = (at0.values() - m.u0.values()).norm() / m.u0.norm();
        worst_identity = std::max(worst_identity, id);
        for (double t : {0.5, 1.0, 2.0}) {
            const double scale = m.model.operator_norm() * m.u0.norm();
            const double c = commutation_defect(f, t, m.u0) / scale;
            worst_commutation = std::max(worst_commutation, c);
            ok = ok && c <= 1e-10;
        }
        ok = ok && id <= 1e-12;
    }
    return {ok, fmt("20 models dim 1..128, max |U(0)u-u|/|u|=%.1e, max commutation/(|A||u|)=%.1e",
                    worst_identity, worst_commutation)};
}

Verdict adjoint_and_gram(const std::vector<RandomModel>& models) {
    double worst_inner = 0.0;
    double worst_gram = 0.0;
    for (const RandomModel& m : models) {
        const SolutionFamily f(m.model, m.order);
        for (double t : {0.5, 1.0, 2.0}) {
            const State ux = propagate(f, t, m.u0);
            const State uy = adjoint_propagate(f, t, m.y);
            const cd lhs = m.y.values().dot(ux.values());
            const cd rhs = uy.values().dot(m.u0.values());
            worst_inner = std::max(worst_inner, std::abs(lhs - rhs) / (m.u0.norm() * m.y.norm()));

            const std::vector<double> g = gram_multiplier(f, t);
            const ComplexVector c = m.model.basis().adjoint() * m.u0.values();
            double predicted = 0.0;
            for (Eigen::Index j = 0; j < c.size(); ++j) {
                predicted += g[static_cast<std::size_t>(j)] * std::norm(c[j]);
            }
            const double actual = ux.values().squaredNorm();
            worst_gram = std::max(worst_gram, std::abs(actual - predicted) / m.u0.values().squaredNorm());
        }
    }
    return {worst_inner <= 1e-10 && worst_gram <= 1e-10,
            fmt("max inner-product defect=%.1e, max gram defect=%.1e (relative)", worst_inner,
                worst_gram)};
}

Verdict approach_to_unitary() {
    const std::vector<double> alphas{0.9, 0.99, 0.999};
    Verdict v{true, ""};
    auto decreasing = [](const std::vector<AlphaError>& e) {
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (!e[i].failure.empty() || (i > 0 && !(e[i].error < e[i - 1].error))) {
                return false;
            }
        }
        return true;
    };

    const Decomposition matrix = diag_model({0, 1, 2, 3, 4, 5});
    ComplexVector ones = ComplexVector::Ones(6) / std::sqrt(6.0);
    const State u0(ones);
    const auto em = alpha_sweep(matrix, alphas, 1.0, u0);
    const double exact_m = (propagate(SolutionFamily(matrix, FractionalOrder(1.0)), 1.0, u0).values() -
                            unitary_reference(matrix, 1.0, u0).values())
                               .norm();

    const PeriodicGrid grid(1024, 80.0);
    const State g = gaussian(grid, 1.0);
    const auto eg = alpha_sweep(grid, alphas, 0.5, g);
    const State free1 = free_propagate(grid, FractionalOrder(1.0), 0.5, g);
    const double exact_g = (free1.values() - unitary_reference(grid, 0.5, g).values()).norm();
    double closed = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const cd ref = testing::dispersive_gaussian(grid.position(j), 0.0, 1.0, 0.5);
        closed = std::max(closed, std::abs(free1.values()[static_cast<Eigen::Index>(j)] - ref));
    }

    v.pass = decreasing(em) && decreasing(eg) && exact_m <= 1e-10 && exact_g <= 1e-10 &&
             closed <= 1e-8;
    v.detail = fmt("matrix errors %.3e > %.3e > %.3e, grid errors %.3e > %.3e > %.3e, "
                   "alpha=1 defects %.1e/%.1e, closed form %.1e",
                   em[0].error, em[1].error, em[2].error, eg[0].error, eg[1].error, eg[2].error,
                   exact_m, exact_g, closed);
    return v;
}

Verdict semigroup() {
    auto defect = [](double h) {
        const TimeGrid g = TimeGrid::covering(1.0, h);
        return semigroup_defect(0.5, 0.5, SampledPath::sample(g, [](double) { return cd(1.0); }));
    };
    const double d1 = defect(1e-3);
    const double d2 = defect(5e-4);
    const double ratio = d1 / d2;
    return {d1 < 5e-3 && std::abs(ratio - 2.0) <= 0.05,
            fmt("defect h=1e-3 %.4e, h=5e-4 %.4e, ratio %.4f", d1, d2, ratio)};
}

Verdict non_conservation() {
    Verdict v{true, ""};
    const std::vector<double> ts{1.0, 2.0, 4.0};
    for (double a : {0.3, 0.5, 0.7}) {
        const SolutionFamily f(diag_model({1.0}), FractionalOrder(a));
        double dev = 0.0;
        for (const NormSample& s : norm_trace(f, basis(1, 0), ts)) {
            dev = std::max(dev, std::abs(s.norm - 1.0));
        }
        v.pass = v.pass && dev > 0.01;
        v.detail += fmt("%salpha=%g max deviation %.3f", v.detail.empty() ? "" : ", ", a, dev);
    }
    return v;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

Verdict cli_determinism() {
    const fs::path golden = FRACPROP_GOLDEN_DIR;
    const fs::path work = fs::temp_directory_path() / "fracprop_acceptance";
    fs::create_directories(work);
    std::ifstream cases(golden / "cases.txt");
    std::string line;
    int total = 0;
    int repeat_ok = 0;
    int golden_ok = 0;
    while (std::getline(cases, line)) {
        if (line.empty()) {
            continue;
        }
        const std::string name = line.substr(0, line.find(' '));
        const std::string args = line.substr(line.find(' ') + 1);
        ++total;
        std::string outputs[2];
        bool ran = true;
        for (int pass = 0; pass < 2; ++pass) {
            const fs::path out = work / (std::to_string(pass) + "_" + name);
            const std::string cmd = std::string(FRACPROP_CLI) + " " + args + " --out " + out.string();
            ran = ran && std::system(cmd.c_str()) == 0;
            outputs[pass] = slurp(out);
        }
        if (ran && outputs[0] == outputs[1]) {
            ++repeat_ok;
        }
        if (ran && outputs[0] == slurp(golden / name)) {
            ++golden_ok;
        }
    }
    return {total > 0 && repeat_ok == total && golden_ok == total,
            fmt("%d cases, %d byte-identical on repeat, %d match golden files", total, repeat_ok,
                golden_ok)};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        double budget;  // seconds, 0 when unconstrained
        std::function<Verdict()> check;
    };
    const std::vector<RandomModel> models = random_models();
    const std::vector<Criterion> criteria{
        {"Mittag-Leffler backend agreement", 10.0, backend_agreement},
        {"bounded solution multiplier", 30.0, boundedness},
        {"residual certificate", 60.0, residual_certificate},
        {"identity at t=0 and commutation", 30.0, [&] { return identity_and_commutation(models); }},
        {"adjoint identity and gram multiplier", 0.0, [&] { return adjoint_and_gram(models); }},
        {"approach to the unitary group", 60.0, approach_to_unitary},
        {"semigroup law of the fractional integral", 0.0, semigroup},
        {"norm non-conservation", 0.0, non_conservation},
        {"CLI determinism and golden files", 0.0, cli_determinism},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].check();
        } catch (const std::exception& e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (criteria[i].budget > 0.0 && secs >= criteria[i].budget) {
            v.pass = false;
            v.detail += fmt("; over time budget %.0f s", criteria[i].budget);
        }
        failed += v.pass ? 0 : 1;
        std::printf("%s  C%zu %s: %s [%.2f s]\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                    v.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed),
                criteria.size());
    return failed == 0 ? 0 : 1;
}
