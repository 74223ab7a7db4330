#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "fracprop/error.hpp"
#include "fracprop/fracops.hpp"
#include "fracprop/mlf.hpp"

using namespace fracprop;
using cd = std::complex<double>;

namespace {

SampledPath constant(const TimeGrid& g, cd c) {
    return SampledPath::sample(g, [&](double) { return c; });
}

double max_error_t2(double alpha, double h) {
    const TimeGrid g = TimeGrid::covering(1.0, h);
    const CaputoPath d = caputo_l1(FractionalOrder(alpha), SampledPath::sample(g, [](double t) {
                                       return cd(t * t, 0.0);
                                   }));
    double worst = 0.0;
    for (std::size_t k = 1; k < g.size(); ++k) {
        const double t = g.node(k);
        const double exact = 2.0 * std::pow(t, 2.0 - alpha) / std::tgamma(3.0 - alpha);
        worst = std::max(worst, std::abs(d.values[k] - exact));
    }
    return worst;
}

}  // namespace

TEST_SUITE("fracops") {

TEST_CASE("time grid") {
    CHECK_THROWS_AS(TimeGrid(0.0, 10), InvalidArgument);
    CHECK_THROWS_AS(TimeGrid(-1.0, 10), InvalidArgument);
    CHECK_THROWS_AS(TimeGrid(0.1, 1), DegenerateGrid);
    const TimeGrid g = TimeGrid::covering(1.0, 1e-3);
    CHECK(g.size() == 1001);
    CHECK(g.node(0) == 0.0);
    CHECK(g.node(1000) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("sampled path validation") {
    const TimeGrid g(0.1, 3);
    CHECK_THROWS_AS(SampledPath(g, {1.0, 2.0}), DimensionMismatch);
    CHECK_THROWS_AS(SampledPath(g, {1.0, std::nan(""), 2.0}), InvalidArgument);
    CHECK_NOTHROW(SampledPath(g, {1.0, 2.0, 3.0}));
}

TEST_CASE("g weight") {
    for (double t : {0.1, 1.0, 7.5}) {
        CHECK(g_weight(1.0, t) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(g_weight(0.3, t) > 0.0);
    }
    CHECK(g_weight(0.5, 1.0) == doctest::Approx(1.0 / std::sqrt(std::acos(-1.0))));
    CHECK_THROWS_AS(g_weight(0.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(g_weight(0.5, 0.0), InvalidArgument);
}

TEST_CASE("L1 weights are one at the start and strictly decreasing") {
    for (double a : {0.1, 0.5, 0.9}) {
        const std::vector<double> b = l1_weights(a, 10001);
        CHECK(b[0] == 1.0);
        for (std::size_t j = 0; j + 1 < b.size(); ++j) {
            REQUIRE(b[j] > b[j + 1]);
            REQUIRE(b[j + 1] > 0.0);
        }
    }
}

TEST_CASE("RL integral of order one is the ordinary integral") {
    const TimeGrid g = TimeGrid::covering(1.0, 1e-3);
    const SampledPath j = rl_integral(1.0, constant(g, 1.0));
    double worst = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        worst = std::max(worst, std::abs(j[k] - g.node(k)));
    }
    CHECK(worst < 1e-8);
    CHECK(j[0] == cd(0.0, 0.0));
}

TEST_CASE("RL integral of a constant matches c t^alpha / Gamma(alpha + 1)") {
    const TimeGrid g = TimeGrid::covering(2.0, 1e-3);
    const cd c(1.5, -0.5);
    const SampledPath j = rl_integral(0.4, constant(g, c));
    for (std::size_t k = 0; k < g.size(); k += 97) {
        const cd exact = c * std::pow(g.node(k), 0.4) / std::tgamma(1.4);
        CHECK(std::abs(j[k] - exact) < 1e-11);
    }
}

TEST_CASE("RL integral of t is exact for piecewise-linear data") {
    const TimeGrid g = TimeGrid::covering(1.0, 1e-3);
    const SampledPath j =
        rl_integral(0.5, SampledPath::sample(g, [](double t) { return cd(t, 0.0); }));
    CHECK(std::abs(j[1000] - 0.75225277806367504926) < 1e-12);
    for (std::size_t k = 0; k < g.size(); k += 50) {
        const double exact = std::pow(g.node(k), 1.5) / 1.3293403881791370205;
        CHECK(std::abs(j[k] - exact) < 1e-12);
    }
}

TEST_CASE("two half integrals equal one full integral") {
    const TimeGrid g = TimeGrid::covering(1.0, 1e-3);
    const SampledPath one = constant(g, 1.0);
    const SampledPath twice = rl_integral(0.5, rl_integral(0.5, one));
    const SampledPath full = rl_integral(1.0, one);
    double worst = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        worst = std::max(worst, std::abs(twice[k] - full[k]));
    }
    CHECK(worst < 2.0 * g.h());
}

TEST_CASE("Caputo derivative kills constants exactly") {
    const TimeGrid g = TimeGrid::covering(1.0, 1e-2);
    for (double a : {0.2, 0.5, 0.9, 1.0}) {
        const CaputoPath d = caputo_l1(FractionalOrder(a), constant(g, cd(3.0, -2.0)));
        CHECK(std::isnan(d.values[0].real()));
        for (std::size_t k = 1; k < g.size(); ++k) {
            REQUIRE(d.values[k] == cd(0.0, 0.0));
        }
    }
}

TEST_CASE("Caputo derivative of t") {
    const TimeGrid g = TimeGrid::covering(1.0, 1e-3);
    const CaputoPath d = caputo_l1(FractionalOrder(0.5),
                                   SampledPath::sample(g, [](double t) { return cd(t, 0.0); }));
    CHECK(std::abs(d.values[1000] - 1.1283791670955125739) < 1e-10);
    for (std::size_t k = 1; k < g.size(); k += 37) {
        const double exact = std::sqrt(g.node(k)) / 0.88622692545275801365;
        CHECK(std::abs(d.values[k] - exact) < 1e-10);
    }
}

TEST_CASE("Caputo derivative is linear") {
    const TimeGrid g = TimeGrid::covering(1.0, 1e-2);
    const SampledPath u = SampledPath::sample(g, [](double t) { return cd(std::sin(t), t * t); });
    const SampledPath v = SampledPath::sample(g, [](double t) { return cd(std::exp(-t), 1.0); });
    const cd a(2.0, 1.0);
    const cd b(-0.5, 3.0);
    std::vector<cd> mix(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        mix[k] = a * u[k] + b * v[k];
    }
    const FractionalOrder o(0.6);
    const CaputoPath du = caputo_l1(o, u);
    const CaputoPath dv = caputo_l1(o, v);
    const CaputoPath dm = caputo_l1(o, SampledPath(g, mix));
    for (std::size_t k = 1; k < g.size(); ++k) {
        const cd expect = a * du.values[k] + b * dv.values[k];
        REQUIRE(std::abs(dm.values[k] - expect) <= 1e-12 * (1.0 + std::abs(expect)));
    }
}

TEST_CASE("Caputo L1 order on t^2 is 2 - alpha") {
    for (double a : {0.3, 0.5, 0.7}) {
        const double e1 = max_error_t2(a, 1.0 / 200);
        const double e2 = max_error_t2(a, 1.0 / 400);
        const double order = std::log2(e1 / e2);
        CHECK(order >= 2.0 - a - 0.2);
        CHECK(order <= 2.0 - a + 0.2);
    }
}

TEST_CASE("Caputo derivative of the real-axis Mittag-Leffler solution") {
    const FractionalOrder o(0.5);
    auto err = [&](double h) {
        const TimeGrid g = TimeGrid::covering(1.0, h);
        const SampledPath u = SampledPath::sample(
            g, [&](double t) { return ml_eval(o, -std::sqrt(t)).value; });
        const CaputoPath d = caputo_l1(o, u);
        double worst = 0.0;
        for (std::size_t k = residual_skip(g.size()); k < g.size(); ++k) {
            worst = std::max(worst, std::abs(d.values[k] + u[k]));
        }
        return worst;
    };
    const double e1 = err(1e-3);
    const double e2 = err(5e-4);
    CHECK(e1 < 5e-3);
    CHECK(e2 < e1);
}

TEST_CASE("equation residual") {
    CHECK(residual_skip(1001) == 101);
    CHECK(residual_skip(10) == 1);
    CHECK_THROWS_AS(equation_residual(FractionalOrder(0.5), 1.0, constant(TimeGrid(0.1, 3), 1.0)),
                    DegenerateGrid);

    // classical case: first-order convergence of the backward difference
    const double w = 2.0;
    auto classical = [&](double h) {
        const TimeGrid g = TimeGrid::covering(1.0, h);
        return equation_residual(FractionalOrder(1.0), w, SampledPath::sample(g, [&](double t) {
                                     return std::exp(cd(0.0, -w * t));
                                 }));
    };
    const double r1 = classical(1e-3);
    const double r2 = classical(5e-4);
    CHECK(r1 < 1e-2);
    CHECK(std::log2(r1 / r2) == doctest::Approx(1.0).epsilon(0.05));

    // the fractional solution on the ray
    const FractionalOrder o(0.5);
    auto fractional = [&](double h) {
        const TimeGrid g = TimeGrid::covering(1.0, h);
        return equation_residual(o, 1.0, SampledPath::sample(g, [&](double t) {
                                     return ml_ray(RayPoint(o, t, 1.0));
                                 }));
    };
    const double f1 = fractional(1e-3);
    const double f2 = fractional(5e-4);
    CHECK(f1 < 0.05);
    CHECK(std::log2(f1 / f2) >= 1.3);
}

TEST_CASE("equation residual detects a perturbed node") {
    const FractionalOrder o(0.5);
    const TimeGrid g = TimeGrid::covering(1.0, 1e-3);
    std::vector<cd> v(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
        v[k] = ml_ray(RayPoint(o, g.node(k), 1.0));
    }
    const double clean = equation_residual(o, 1.0, SampledPath(g, v));
    v[500] += 0.1;
    const double dirty = equation_residual(o, 1.0, SampledPath(g, v));
    CHECK(dirty - clean >= 0.1 * 1.0 * (1.0 - 1e-12));
}

TEST_CASE("semigroup defect") {
    auto defect = [](double a, double b, double h, auto f) {
        const TimeGrid g = TimeGrid::covering(1.0, h);
        return semigroup_defect(a, b, SampledPath::sample(g, [&](double t) { return cd(f(t)); }));
    };
    auto one = [](double) { return 1.0; };
    const double d1 = defect(0.5, 0.5, 1e-3, one);
    const double d2 = defect(0.5, 0.5, 5e-4, one);
    CHECK(d1 < 5e-3);
    CHECK(d2 <= 0.5 * d1 * (1.0 + 1e-6));

    CHECK(defect(1.0, 1.0, 1e-3, [](double t) { return t; }) < 1e-6);

    auto sine = [](double t) { return std::sin(t); };
    const double s1 = defect(0.25, 0.75, 2e-3, sine);
    const double s2 = defect(0.25, 0.75, 1e-3, sine);
    CHECK(s2 <= 0.5 * s1 * (1.0 + 0.05));

    CHECK_THROWS_AS(defect(0.0, 0.5, 1e-2, one), InvalidArgument);
    CHECK_THROWS_AS(defect(0.5, -1.0, 1e-2, one), InvalidArgument);
}

}  // TEST_SUITE
