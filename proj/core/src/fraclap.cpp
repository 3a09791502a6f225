#include "fracflow/fraclap.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fracflow/errors.hpp"
#include "fracflow/special.hpp"

namespace fracflow::fraclap {

double sphere_eigenvalue(int n, double gamma, int k) {
    const double half_n = 0.5 * n;
    return special::gamma_ratio(k + half_n + gamma, k + half_n - gamma);
}

double symbol_value(const Geometry& geom, const BasisMode& mode) {
    if (geom.kind() == GeometryKind::Sphere) {
        return sphere_eigenvalue(geom.dimension(), geom.gamma(), mode.degree);
    }
    if (mode.laplace_eigenvalue == 0.0) {
        return 0.0;
    }
    return std::pow(mode.laplace_eigenvalue, geom.gamma());
}

double multiplier(const Geometry& geom, int k) {
    if (k < 0 || k > geom.truncation()) {
        throw ModeOutOfRange("mode " + std::to_string(k) + " outside [0, " +
                             std::to_string(geom.truncation()) + "]");
    }
    if (geom.kind() == GeometryKind::Sphere) {
        return sphere_eigenvalue(geom.dimension(), geom.gamma(), k);
    }
    const double kappa = 2.0 * std::numbers::pi * k / geom.period();
    return k == 0 ? 0.0 : std::pow(kappa, 2.0 * geom.gamma());
}

SpectralField apply_P(const SpectralField& f) {
    return SpectralField(f.geometry_ptr(), f.geometry().symbol().cwiseProduct(f.coeffs()));
}

double quadratic_form(const SpectralField& f) {
    return (f.geometry().symbol().array() * f.coeffs().array().square()).sum();
}

double pairing(const SpectralField& v, const SpectralField& w) {
    require_same_geometry(v, w);
    const auto& geom = v.geometry();
    const SpectralField pv = apply_P(v);
    return geom.grid().weights.dot(pv.grid_values().cwiseProduct(w.grid_values()));
}

// ---------------------------------------------------------------------------
// Extension ODE

std::vector<double> graded_mesh(double rho_max, int nodes) {
    if (nodes < 8) {
        throw SingularMeshError("extension mesh needs at least 8 nodes");
    }
    const int cells = nodes - 1;
    const double first = 1e-6 * rho_max;
    // Solve first * (r^cells - 1) / (r - 1) = rho_max for the growth ratio r > 1.
    const double target = rho_max / first;
    auto total = [cells](double r) { return (std::pow(r, cells) - 1.0) / (r - 1.0); };
    if (total(1.0 + 1e-12) >= target) {
        throw SingularMeshError("too many nodes for a graded extension mesh");
    }
    double lo = 1.0 + 1e-12;
    double hi = 2.0;
    while (total(hi) < target) {
        hi *= 2.0;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (total(mid) < target ? lo : hi) = mid;
    }
    const double ratio = 0.5 * (lo + hi);
    std::vector<double> mesh(nodes);
    mesh[0] = 0.0;
    double width = first;
    for (int i = 1; i < nodes; ++i) {
        mesh[i] = mesh[i - 1] + width;
        width *= ratio;
    }
    mesh.back() = rho_max;
    return mesh;
}

ExtensionProfile solve_extension(double wavenumber, double gamma, const std::vector<double>& mesh) {
    const std::size_t n = mesh.size();
    if (n < 3 || mesh[0] != 0.0) {
        throw SingularMeshError("extension mesh must start at rho = 0 and have >= 3 nodes");
    }
    const double rho_max = mesh.back();
    if (mesh[1] > 1e-6 * rho_max * (1.0 + 1e-12)) {
        throw SingularMeshError("first interior node must lie within 1e-6*rho_max of 0");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(mesh[i] > mesh[i - 1])) {
            throw SingularMeshError("extension mesh must be strictly increasing");
        }
    }
    if (wavenumber * rho_max < 20.0) {
        throw DecayError("rho_max*|k| must be >= 20 for the decaying profile");
    }

    const double a = 1.0 - 2.0 * gamma;
    const double two_gamma = 2.0 * gamma;
    const double k2 = wavenumber * wavenumber;

    // Exact conductances of the weight: for (ρ^a W')' = 0 the profile is ρ^{2γ}.
    std::vector<double> cond(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        cond[i] = two_gamma / (std::pow(mesh[i + 1], two_gamma) - std::pow(mesh[i], two_gamma));
    }
    auto weight_integral = [a](double lo, double hi) {
        return (std::pow(hi, 1.0 + a) - std::pow(lo, 1.0 + a)) / (1.0 + a);
    };
    std::vector<double> mass(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = (i == 0) ? 0.0 : 0.5 * (mesh[i - 1] + mesh[i]);
        const double hi = (i + 1 == n) ? mesh[i] : 0.5 * (mesh[i] + mesh[i + 1]);
        mass[i] = weight_integral(lo, hi);
    }

    // Unknowns W_1..W_{n-1}; W_0 = 1. Tridiagonal rows:
    //   cond[i-1] W_{i-1} - (cond[i-1] + cond[i] + k² m_i) W_i + cond[i] W_{i+1} = 0
    // with a Robin closure ρ^a W' = -κ ρ^a W at the outer node.
    const std::size_t m = n - 1;
    std::vector<double> lower(m, 0.0);
    std::vector<double> diag(m, 0.0);
    std::vector<double> upper(m, 0.0);
    std::vector<double> rhs(m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t i = r + 1;
        const double left = cond[i - 1];
        const double right = (i + 1 < n) ? cond[i] : 0.0;
        double d = -(left + right + k2 * mass[i]);
        if (i + 1 == n) {
            d -= wavenumber * std::pow(mesh[i], a);
        }
        diag[r] = d;
        if (r > 0) {
            lower[r] = left;
        } else {
            rhs[r] = -left * 1.0;
        }
        if (i + 1 < n) {
            upper[r] = right;
        }
    }
    // Thomas algorithm on copies so the residual can be evaluated afterwards.
    std::vector<double> c(m), d(m), x(m);
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for (std::size_t r = 1; r < m; ++r) {
        const double denom = diag[r] - lower[r] * c[r - 1];
        c[r] = upper[r] / denom;
        d[r] = (rhs[r] - lower[r] * d[r - 1]) / denom;
    }
    x[m - 1] = d[m - 1];
    for (std::size_t r = m - 1; r-- > 0;) {
        x[r] = d[r] - c[r] * x[r + 1];
    }

    double res_sq = 0.0;
    double rhs_sq = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
        double ax = diag[r] * x[r];
        if (r > 0) {
            ax += lower[r] * x[r - 1];
        }
        if (r + 1 < m) {
            ax += upper[r] * x[r + 1];
        }
        const double scale = std::abs(diag[r] * x[r]) + std::abs(rhs[r]);
        const double e = (ax - rhs[r]) / (scale > 0.0 ? scale : 1.0);
        res_sq += e * e;
        rhs_sq += 1.0;
    }

    ExtensionProfile profile;
    profile.wavenumber = wavenumber;
    profile.gamma = gamma;
    profile.weight_exponent = a;
    profile.rho = mesh;
    profile.values.resize(n);
    profile.values[0] = 1.0;
    for (std::size_t r = 0; r < m; ++r) {
        profile.values[r + 1] = x[r];
    }
    profile.residual = std::sqrt(res_sq / rhs_sq);

    if (std::abs(profile.values.back()) > 1e-8) {
        throw DecayError("extension profile has not decayed at rho_max (W = " +
                         std::to_string(profile.values.back()) + ")");
    }

    // Conservative flux at ρ = 0: q(0) = q_{1/2} - κ² ∫_0^{ρ_{1/2}} ρ^a W dρ.
    const double q_half = cond[0] * (profile.values[1] - profile.values[0]);
    const double q0 = q_half - k2 * mass[0] * profile.values[0];
    profile.flux = -q0;
    return profile;
}

double extension_dtn(const Geometry& torus, int k, double rho_max, int nodes) {
    if (torus.kind() != GeometryKind::Torus) {
        throw GeometryMismatch("extension_dtn is implemented on the torus only");
    }
    if (k == 0) {
        throw ModeOutOfRange("extension_dtn requires a nonzero mode");
    }
    const double kappa = 2.0 * std::numbers::pi * std::abs(k) / torus.period();
    return solve_extension(kappa, torus.gamma(), graded_mesh(rho_max, nodes)).flux;
}

Calibration calibrate_cgamma(const Geometry& torus, int max_mode, double tolerance) {
    if (torus.kind() != GeometryKind::Torus) {
        throw GeometryMismatch("calibrate_cgamma is implemented on the torus only");
    }
    Calibration cal;
    const double two_gamma = 2.0 * torus.gamma();
    for (int k = 1; k <= max_mode; ++k) {
        const double kappa = 2.0 * std::numbers::pi * k / torus.period();
        const double rho_max = 25.0 / kappa;
        const double flux = extension_dtn(torus, k, rho_max, kDefaultExtensionNodes);
        cal.ratios.push_back(std::pow(kappa, two_gamma) / flux);
    }
    cal.c_gamma = cal.ratios.front();
    for (double r : cal.ratios) {
        cal.max_relative_spread =
            std::max(cal.max_relative_spread, std::abs(r - cal.c_gamma) / cal.c_gamma);
    }
    if (cal.max_relative_spread > tolerance) {
        throw CalibrationError("c_gamma ratios disagree across modes (spread " +
                               std::to_string(cal.max_relative_spread) + ")");
    }
    return cal;
}

}  // namespace fracflow::fraclap
