#include <doctest.h>

#include <cmath>

#include "fracflow/errors.hpp"
#include "fracflow/fraclap.hpp"
#include "fracflow/functionals.hpp"
#include "fracflow/random_fields.hpp"
#include "fracflow/stability.hpp"
#include "support.hpp"

using namespace fracflow;
using fftest::pi;
using fftest::rel;

namespace {

void check_pairs(const WeightedSpectrum& sp) {
    for (std::size_t a = 0; a < sp.pairs.size(); ++a) {
        if (sp.pairs[a].lambda > 1e-12) {
            CHECK(eigen_residual(sp.pairs[a], sp.mass) <= 1e-8);
        }
        for (std::size_t b = 0; b < sp.pairs.size(); b += 3) {
            const double g = sp.pairs[a].psi.coeffs().dot(sp.mass * sp.pairs[b].psi.coeffs());
            CHECK(std::abs(g - (a == b ? 1.0 : 0.0)) < 1e-8);
        }
    }
}

// Synthetic series with a prescribed relation between s − s_∞ and F_p.
DiagnosticsSeries synthetic(int n, double gamma, const std::function<std::pair<double, double>(double)>& gap_fp) {
    DiagnosticsSeries series;
    series.n = n;
    series.gamma = gamma;
    for (int i = 0; i <= 200; ++i) {
        DiagnosticsRow row;
        row.t = 0.05 * i;
        const auto [gap, fp] = gap_fp(row.t);
        row.s = 1.0 + gap;
        row.Fp = fp;
        series.rows.push_back(row);
    }
    return series;
}

}  // namespace

TEST_CASE("weighted eigenpairs satisfy the pencil and are W-orthonormal") {
    CounterRng rng(41);
    for (const auto& g : {make_torus(1, 2 * pi, 16, 0.3), make_sphere(2, 8, 0.5), make_sphere(1, 12, 0.25)}) {
        const auto u = random_positive_field(g, rng, 0.3);
        check_pairs(weighted_eigs(u, 20));
    }
}

TEST_CASE("constant weights reproduce the multiplier table") {
    const auto s2 = make_sphere(2, 8, 0.5);
    const auto sp = weighted_eigs(SpectralField::constant(s2, 1.0), 0);
    REQUIRE(sp.pairs.size() == s2->basis_size());
    std::size_t a = 0;
    for (int l = 0; l <= 8; ++l) {
        for (int m = 0; m < 2 * l + 1; ++m, ++a) {
            CHECK(rel(sp.pairs[a].lambda, fraclap::multiplier(*s2, l)) < 1e-12);
        }
    }
    const double c = 1.7;
    const auto scaled = weighted_eigs(SpectralField::constant(s2, c), 10);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(rel(scaled.pairs[i].lambda, sp.pairs[i].lambda * std::pow(c, -2.0)) < 1e-12);
    }
    CHECK_THROWS_AS(weighted_eigs(fftest::y10_sphere(s2, -5.0), 5), PositivityError);
}

TEST_CASE("weighted eigenvalues are resolved") {
    auto eigs = [](int modes) {
        const auto t = make_torus(1, 2 * pi, modes, 0.3);
        return weighted_eigs(fftest::cosine_torus(t, 0.2), 12);
    };
    const auto a = eigs(64);
    const auto b = eigs(128);
    for (std::size_t i = 0; i < 12; ++i) {
        CHECK(std::abs(a.pairs[i].lambda - b.pairs[i].lambda) <= 1e-6 * std::max(1.0, b.pairs[i].lambda));
    }
}

TEST_CASE("projection Pi") {
    CounterRng rng(43);
    const auto s2 = make_sphere(2, 8, 0.5);
    const auto u = random_positive_field(s2, rng, 0.3);
    const auto sp = weighted_eigs(u, 20);
    const LowModeSet A{{0, 1, 2, 3}, 1.0};

    for (int b : A.indices) {
        const Eigen::VectorXd wpsi = sp.weight_fine.cwiseProduct(sp.pairs[static_cast<std::size_t>(b)].psi.fine_values());
        CHECK(projection_Pi(project_fine(s2, wpsi), sp, A).coeffs().norm() < 1e-10);
    }
    for (int i = 0; i < 20; ++i) {
        const auto f = random_field(s2, rng, 0.5);
        const auto p1 = projection_Pi(f, sp, A);
        CHECK((projection_Pi(p1, sp, A).coeffs() - p1.coeffs()).norm() < 1e-9 * std::max(1.0, p1.coeffs().norm()));
        const auto q1 = projection_Pi_canonical(f, sp, A);
        CHECK((projection_Pi_canonical(q1, sp, A).coeffs() - q1.coeffs()).norm() < 1e-9 * q1.coeffs().norm());
        for (int a : A.indices) {
            CHECK(std::abs(sp.pairs[static_cast<std::size_t>(a)].psi.coeffs().dot(sp.mass * q1.coeffs())) < 1e-10);
        }
        const LowModeSet none{{}, 1.0};
        CHECK((projection_Pi(f, sp, none).coeffs() - f.coeffs()).norm() == 0.0);
    }
    const LowModeSet bad{{40}, 1.0};
    CHECK_THROWS_AS(projection_Pi(random_field(s2, rng), sp, bad), IndexError);
}

TEST_CASE("coercivity on the round sphere") {
    const auto s2 = make_sphere(2, 16, 0.5);
    const auto one = SpectralField::constant(s2, 1.0);
    const auto sp = weighted_eigs(one, 30);
    const double s_inf = mean_curvature_s(one);
    const auto A = low_mode_set(sp, *s2, s_inf);
    CHECK(A.indices.size() == 4);
    CHECK(rel(A.threshold, 1.5) < 1e-12);
    const double lam_next = fraclap::multiplier(*s2, 2);
    const double expected = 1.0 - A.threshold / lam_next;
    CHECK(std::abs(expected - 0.4) < 1e-12);
    CHECK(std::abs(coercivity_gap(sp, A, one, 50, 7) - expected) < 1e-10);
    const double r = coercivity_ratio(sp.pairs[4].psi, sp, A);
    CHECK(std::abs(r - A.threshold / sp.pairs[4].lambda) < 1e-12);
}

TEST_CASE("coercivity on the flat torus is trivial") {
    const auto t = make_torus(1, 2 * pi, 16, 0.3);
    const auto one = SpectralField::constant(t, 1.0);
    const auto sp = weighted_eigs(one, 10);
    const auto A = low_mode_set(sp, *t, mean_curvature_s(one));
    CHECK(A.indices.size() == 1);
    CHECK(coercivity_gap(sp, A, one, 20, 3) == 1.0);
}

TEST_CASE("threshold sits on the degree-one eigenvalue for every gamma") {
    // λ(1)/λ(0) = (n/2+γ)/(n/2−γ) equals the threshold ratio identically, so the tie rule
    // keeps A at degree ≤ 1 on both sides of γ = 1/2.
    for (double g : {0.45, 0.5, 0.55}) {
        const auto s2 = make_sphere(2, 8, g);
        const double ratio = (2 + 2 * g) / (2 - 2 * g);
        CHECK(rel(fraclap::multiplier(*s2, 1), ratio * fraclap::multiplier(*s2, 0)) < 1e-13);
        CHECK(fraclap::multiplier(*s2, 2) > ratio * fraclap::multiplier(*s2, 0));
        const auto one = SpectralField::constant(s2, 1.0);
        const auto A = low_mode_set(weighted_eigs(one, 20), *s2, mean_curvature_s(one));
        CHECK(A.indices.size() == 4);
    }
}

TEST_CASE("low mode set edge cases") {
    const auto t = make_torus(1, 2 * pi, 8, 0.3);
    auto spectrum = [&](std::vector<double> lams) {
        WeightedSpectrum sp;
        for (double l : lams) sp.pairs.push_back({l, SpectralField::constant(t, 1.0)});
        return sp;
    };
    // threshold = 4 · 0.25 = 1
    CHECK(low_mode_set(spectrum({0.5, 1.0, 2.0}), *t, 0.25).indices.size() == 2);
    CHECK_THROWS_AS(low_mode_set(spectrum({0.5, 1.0 + 1e-9, 2.0}), *t, 0.25), DegenerateError);
    CHECK_THROWS_AS(low_mode_set(spectrum({0.5, 0.9}), *t, 0.25), IndexError);
}

TEST_CASE("sphere gap margin") {
    CHECK(std::abs(sphere_gap_margin(2, 0.5) - 1.0) < 1e-12);
    // The simplified form α^{4γ/(n−2γ)} = 2^{2γ} Γ(n/2+γ)/Γ(n/2−γ).
    for (auto [n, g] : {std::pair{1, 0.2}, std::pair{2, 0.7}, std::pair{2, 0.3}}) {
        const double h = 0.5 * n;
        const double lhs = std::exp(std::lgamma(2 + h + g) - std::lgamma(2 + h - g));
        const double simp = std::pow(2.0, 2 * g) * std::exp(std::lgamma(h + g) - std::lgamma(h - g));
        const double rhs = simp * (n + 2 * g) / (n - 2 * g) * std::pow(2.0, -2 * g);
        CHECK(std::abs(sphere_gap_margin(n, g) - (lhs - rhs)) < 1e-12);
    }
    for (int n : {1, 2}) {
        const double hi = std::min(1.0, 0.5 * n) - 0.05;
        for (int i = 0; i < 50; ++i) {
            const double g = 0.05 + (hi - 0.05) * i / 49.0;
            CHECK(sphere_gap_margin(n, g) > 0.0);
        }
        CHECK(sphere_gap_margin(n, 1e-3) > 0.0);
    }
    CHECK_THROWS_AS(sphere_gap_margin(1, 0.5), RangeError);
    CHECK_THROWS_AS(sphere_gap_margin(3, 0.5), RangeError);
    CHECK_THROWS_AS(sphere_gap_margin(2, 1.0), RangeError);
}

TEST_CASE("Cauchy-Schwarz in the weighted energy norm") {
    CounterRng rng(47);
    for (const auto& g : {make_torus(1, 2 * pi, 12, 0.3), make_sphere(2, 6, 0.5)}) {
        const auto u_inf = random_positive_field(g, rng, 0.3);
        const auto sp = weighted_eigs(u_inf, 0);
        for (int i = 0; i < 100; ++i) {
            const auto u = random_field(g, rng, 0.5);
            const auto v = random_field(g, rng, 0.5);
            CHECK(cauchy_schwarz_slack(u, v, sp) >= -1e-10);
        }
        CHECK_THROWS_AS(cauchy_schwarz_slack(u_inf, u_inf, weighted_eigs(u_inf, 5)), IndexError);
    }
}

TEST_CASE("Lojasiewicz exponent fit") {
    const int n = 2;
    const double g = 0.5;
    const double power = (n + 2 * g) * 1.5 / (2.0 * n);
    const auto planted = synthetic(n, g, [&](double t) {
        const double fp = std::exp(-t);
        return std::pair{std::pow(fp, power), fp};
    });
    const auto fit = lojasiewicz_fit(planted, 1.0);
    CHECK(std::abs(fit.delta - 0.5) < 0.05);
    CHECK(fit.in_band);

    const double p = 2.0 * n / (n + 2 * g);
    const auto expo = synthetic(n, g, [&](double t) {
        return std::pair{0.3 * std::exp(-2 * 0.8 * t), std::exp(-p * 0.8 * t)};
    });
    CHECK(std::abs(lojasiewicz_fit(expo, 1.0).delta - 1.0) < 1e-6);

    const auto flat = synthetic(n, g, [](double) { return std::pair{0.0, 1.0}; });
    CHECK_THROWS_AS(lojasiewicz_fit(flat, 1.0), InsufficientDataError);
}
