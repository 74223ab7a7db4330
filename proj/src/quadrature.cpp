#include "fracprop/quadrature.hpp"

#include <numbers>

namespace fracprop::quad {

GaussLegendreRule gauss_legendre(std::size_t n) {
    if (n == 0) {
        throw InvalidArgument("Gauss-Legendre rule needs n >= 1");
    }
    GaussLegendreRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    const double dn = static_cast<double>(n);
    std::size_t m = (n + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Three-term recurrence for P_n(x) and P_{n-1}(x).
            double p0 = 1.0;
            double p1 = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                double p2 = p1;
                p1 = p0;
                double dj = static_cast<double>(j);
                p0 = ((2.0 * dj - 1.0) * x * p1 - (dj - 1.0) * p2) / dj;
            }
            dp = dn * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        rule.nodes[n / 2] = 0.0;
    }
    return rule;
}

const GaussLegendreRule& default_rule() {
    static const GaussLegendreRule rule = gauss_legendre(12);
    return rule;
}

}  // namespace fracprop::quad
