#include "fracflow/stability.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "fracflow/errors.hpp"
#include "fracflow/fraclap.hpp"
#include "fracflow/functionals.hpp"
#include "fracflow/rng.hpp"
#include "fracflow/special.hpp"

namespace fracflow {

namespace {

Eigen::MatrixXd fine_basis(const Geometry& geom) {
    const auto N = static_cast<Eigen::Index>(geom.basis_size());
    const auto nodes = static_cast<Eigen::Index>(geom.grid(Geometry::Level::Fine).size());
    Eigen::MatrixXd B(nodes, N);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(N);
    for (Eigen::Index j = 0; j < N; ++j) {
        e[j] = 1.0;
        B.col(j) = geom.to_grid(e, Geometry::Level::Fine);
        e[j] = 0.0;
    }
    return B;
}

double conformal_ratio(const Geometry& geom) {
    return (geom.dimension() + 2.0 * geom.gamma()) / (geom.dimension() - 2.0 * geom.gamma());
}

}  // namespace

Eigen::MatrixXd weight_mass_matrix(const Geometry& geom, const Eigen::VectorXd& weight_fine) {
    const Eigen::MatrixXd B = fine_basis(geom);
    const Eigen::VectorXd w = geom.grid(Geometry::Level::Fine).weights.cwiseProduct(weight_fine);
    Eigen::MatrixXd M = B.transpose() * w.asDiagonal() * B;
    return 0.5 * (M + M.transpose());
}

WeightedSpectrum weighted_eigs(const SpectralField& u_inf, int count) {
    const Geometry& geom = u_inf.geometry();
    const auto ex = Exponents::of(geom);
    const Eigen::VectorXd uf = u_inf.fine_values();
    Eigen::Index where = 0;
    const double mn = uf.minCoeff(&where);
    if (!(mn > kPositivityFloor)) {
        throw PositivityError("u_inf must be positive for the weighted eigenproblem", mn,
                              static_cast<std::size_t>(where));
    }
    WeightedSpectrum out;
    out.weight_fine = uf.array().pow(ex.beta).matrix();
    out.mass = weight_mass_matrix(geom, out.weight_fine);
    const Eigen::MatrixXd K = geom.symbol().asDiagonal();
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(K, out.mass);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("generalized eigensolver did not converge");
    }
    const auto N = static_cast<int>(geom.basis_size());
    const int take = (count <= 0 || count > N) ? N : count;
    out.pairs.reserve(static_cast<std::size_t>(take));
    for (int a = 0; a < take; ++a) {
        out.pairs.push_back(
            {solver.eigenvalues()[a], SpectralField(u_inf.geometry_ptr(), solver.eigenvectors().col(a))});
    }
    return out;
}

double eigen_residual(const EigenPair& pair, const Eigen::MatrixXd& mass) {
    const Eigen::VectorXd& c = pair.psi.coeffs();
    const Eigen::VectorXd r =
        pair.psi.geometry().symbol().cwiseProduct(c) - pair.lambda * (mass * c);
    const double scale = std::max(std::abs(pair.lambda), 1e-300) * c.norm();
    return r.norm() / scale;
}

LowModeSet low_mode_set(const WeightedSpectrum& spectrum, const Geometry& geom, double s_inf) {
    LowModeSet A;
    A.threshold = conformal_ratio(geom) * s_inf;
    // Zero thresholds (flat limits) need an absolute floor tied to the operator scale.
    const double ref = std::max(std::abs(A.threshold), 1e-4 * geom.symbol().cwiseAbs().maxCoeff());
    const double tie = 1e-10 * ref;
    std::size_t a = 0;
    for (; a < spectrum.pairs.size(); ++a) {
        if (spectrum.pairs[a].lambda <= A.threshold + tie) {
            A.indices.push_back(static_cast<int>(a));
        } else {
            break;
        }
    }
    if (a == spectrum.pairs.size()) {
        throw IndexError("no computed eigenvalue lies above the threshold; request more pairs");
    }
    if (spectrum.pairs[a].lambda <= A.threshold + 1e-8 * ref) {
        throw DegenerateError("an eigenvalue sits on the coercivity threshold");
    }
    return A;
}

SpectralField projection_Pi(const SpectralField& f, const WeightedSpectrum& spectrum,
                            const LowModeSet& A) {
    Eigen::VectorXd c = f.coeffs();
    for (int a : A.indices) {
        if (a < 0 || static_cast<std::size_t>(a) >= spectrum.pairs.size()) {
            throw IndexError("low-mode index outside the computed eigenpairs");
        }
        const Eigen::VectorXd& psi = spectrum.pairs[static_cast<std::size_t>(a)].psi.coeffs();
        c -= psi.dot(f.coeffs()) * (spectrum.mass * psi);
    }
    return SpectralField(f.geometry_ptr(), c);
}

SpectralField projection_Pi_canonical(const SpectralField& f, const WeightedSpectrum& spectrum,
                                      const LowModeSet& A) {
    Eigen::VectorXd c = f.coeffs();
    const Eigen::VectorXd mf = spectrum.mass * f.coeffs();
    for (int a : A.indices) {
        if (a < 0 || static_cast<std::size_t>(a) >= spectrum.pairs.size()) {
            throw IndexError("low-mode index outside the computed eigenpairs");
        }
        const Eigen::VectorXd& psi = spectrum.pairs[static_cast<std::size_t>(a)].psi.coeffs();
        c -= psi.dot(mf) * psi;
    }
    return SpectralField(f.geometry_ptr(), c);
}

double coercivity_ratio(const SpectralField& w, const WeightedSpectrum& spectrum,
                        const LowModeSet& A) {
    const Eigen::VectorXd& c = w.coeffs();
    const double weighted = c.dot(spectrum.mass * c);
    const double energy = fraclap::quadratic_form(w);
    if (A.threshold == 0.0) {
        return 0.0;
    }
    return A.threshold * weighted / energy;
}

double coercivity_gap(const WeightedSpectrum& spectrum, const LowModeSet& A,
                      const SpectralField& u_inf, int probe_count, std::uint64_t seed,
                      bool include_eigenprobes) {
    const auto& geom = u_inf.geometry_ptr();
    double worst = 0.0;
    CounterRng rng(seed, 0xC0E5);
    const auto N = static_cast<Eigen::Index>(geom->basis_size());
    for (int p = 0; p < probe_count; ++p) {
        Eigen::VectorXd c(N);
        for (Eigen::Index i = 0; i < N; ++i) {
            c[i] = rng.normal();
        }
        const SpectralField w =
            projection_Pi_canonical(SpectralField(geom, c), spectrum, A);
        worst = std::max(worst, coercivity_ratio(w, spectrum, A));
    }
    if (include_eigenprobes) {
        for (std::size_t a = A.indices.size(); a < spectrum.pairs.size(); ++a) {
            worst = std::max(worst, coercivity_ratio(spectrum.pairs[a].psi, spectrum, A));
        }
    }
    return 1.0 - worst;
}

double sphere_gap_margin(int n, double gamma) {
    if ((n != 1 && n != 2) || !(gamma > 0.0 && gamma < 1.0) || !(n > 2.0 * gamma)) {
        throw RangeError("sphere_gap_margin needs n in {1,2}, 0 < gamma < 1, n > 2 gamma");
    }
    const double h = 0.5 * n;
    const double lhs = special::gamma_ratio(2.0 + h + gamma, 2.0 + h - gamma);
    const double nu = h - gamma;
    const double log_alpha =
        nu * std::log(2.0) +
        nu / (2.0 * gamma) * (special::log_gamma(h + gamma) - special::log_gamma(h - gamma));
    const double alpha_pow = std::exp(2.0 * gamma / nu * log_alpha);
    const double rhs = alpha_pow * (n + 2.0 * gamma) / (n - 2.0 * gamma) * std::pow(2.0, -2.0 * gamma);
    return lhs - rhs;
}

double cauchy_schwarz_slack(const SpectralField& u, const SpectralField& v,
                            const WeightedSpectrum& spectrum) {
    require_same_geometry(u, v);
    if (spectrum.pairs.size() != u.geometry().basis_size()) {
        throw IndexError("Cauchy-Schwarz check needs the full weighted spectrum");
    }
    const Eigen::VectorXd mu = spectrum.mass * u.coeffs();
    const Eigen::VectorXd mv = spectrum.mass * v.coeffs();
    double nu2 = 0.0;
    double nv2 = 0.0;
    for (const auto& pair : spectrum.pairs) {
        const double a = pair.psi.coeffs().dot(mu);
        const double b = pair.psi.coeffs().dot(mv);
        nu2 += pair.lambda * a * a;
        nv2 += pair.lambda * b * b;
    }
    const double cross =
        u.coeffs().dot(u.geometry().symbol().cwiseProduct(v.coeffs()));
    return std::sqrt(std::max(nu2, 0.0)) * std::sqrt(std::max(nv2, 0.0)) - cross;
}

LojasiewiczFit lojasiewicz_fit(const DiagnosticsSeries& series, double s_inf) {
    const std::size_t total = series.rows.size();
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = total / 2; i < total; ++i) {
        const auto& row = series.rows[i];
        const double gap = row.s - s_inf;
        if (gap >= 1e-13 && row.Fp > 0.0) {
            xs.push_back(std::log(row.Fp));
            ys.push_back(std::log(gap));
        }
    }
    if (xs.size() < 20) {
        throw InsufficientDataError("lojasiewicz_fit needs at least 20 tail rows with s - s_inf >= 1e-13");
    }
    const double m = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / m;
    const double my = sy / m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (!(sxx > 0.0)) {
        throw InsufficientDataError("F column has no variation in the tail");
    }
    LojasiewiczFit fit;
    fit.slope = sxy / sxx;
    fit.delta = 2.0 * series.n * fit.slope / (series.n + 2.0 * series.gamma) - 1.0;
    fit.rows_used = xs.size();
    fit.in_band = fit.delta > -0.5 && fit.delta < 1.5;
    return fit;
}

}  // namespace fracflow
