#include "fracflow/special.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fracflow::special {

double log_gamma(double x) {
    if (!(x > 0.0)) {
        throw std::domain_error("log_gamma: argument must be positive");
    }
    return std::lgamma(x);
}

double gamma_ratio(double num_arg, double den_arg) {
    return std::exp(log_gamma(num_arg) - log_gamma(den_arg));
}

GaussRule gauss_legendre(int count) {
    if (count < 1) {
        throw std::invalid_argument("gauss_legendre: count must be >= 1");
    }
    GaussRule rule;
    rule.nodes.resize(count);
    rule.weights.resize(count);
    const int half = (count + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi initial guess, refined by Newton on P_count.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= count; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = count * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        // recompute derivative at the converged node
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= count; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = count * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[count - 1 - i] = x;
        rule.nodes[i] = -x;
        rule.weights[i] = w;
        rule.weights[count - 1 - i] = w;
    }
    return rule;
}

void normalized_legendre(int degree_max, double x, std::vector<double>& out) {
    out.assign(legendre_table_size(degree_max), 0.0);
    const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
    double pmm = std::sqrt(1.0 / (4.0 * std::numbers::pi));
    for (int m = 0; m <= degree_max; ++m) {
        if (m > 0) {
            pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
        }
        out[legendre_index(degree_max, m, m)] = pmm;
        if (m == degree_max) {
            break;
        }
        double prev2 = pmm;
        double prev1 = std::sqrt(2.0 * m + 3.0) * x * pmm;
        out[legendre_index(degree_max, m + 1, m)] = prev1;
        for (int l = m + 2; l <= degree_max; ++l) {
            const double ll = static_cast<double>(l);
            const double mm = static_cast<double>(m);
            const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
            const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) /
                                       (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
            const double cur = a * (x * prev1 - b * prev2);
            out[legendre_index(degree_max, l, m)] = cur;
            prev2 = prev1;
            prev1 = cur;
        }
    }
}

}  // namespace fracflow::special
