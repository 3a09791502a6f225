#pragma once

#include <vector>

namespace fracflow::special {

/// log Γ(x) for x > 0.
double log_gamma(double x);

/// Γ(num_arg) / Γ(den_arg) evaluated as exp(lnΓ(num_arg) − lnΓ(den_arg)).
/// Both arguments must be positive.
double gamma_ratio(double num_arg, double den_arg);

struct GaussRule {
    std::vector<double> nodes;    // ascending in (-1, 1)
    std::vector<double> weights;  // sum to 2
};

/// Gauss–Legendre rule with `count` points on [-1, 1].
GaussRule gauss_legendre(int count);

/// Orthonormal associated Legendre functions on the unit sphere.
///
/// Fills `out` with Pbar_l^m(x) for 0 <= m <= l <= degree_max, laid out so that
/// index(l, m) = m * (degree_max + 1) - m * (m - 1) / 2 + (l - m).
/// Normalized so that Pbar_l^0(cosθ) and √2·Pbar_l^m(cosθ)·{cos mφ, sin mφ} form an
/// orthonormal basis on the unit S² (total area 4π). No Condon–Shortley phase.
void normalized_legendre(int degree_max, double x, std::vector<double>& out);

inline int legendre_index(int degree_max, int l, int m) {
    return m * (degree_max + 1) - m * (m - 1) / 2 + (l - m);
}

inline int legendre_table_size(int degree_max) {
    return (degree_max + 1) * (degree_max + 2) / 2;
}

}  // namespace fracflow::special
