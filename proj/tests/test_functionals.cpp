#include <doctest.h>

#include <cmath>

#include "fracflow/errors.hpp"
#include "fracflow/fraclap.hpp"
#include "fracflow/functionals.hpp"
#include "fracflow/random_fields.hpp"
#include "support.hpp"

using namespace fracflow;
using fftest::pi;
using fftest::rel;

TEST_CASE("exponents") {
    const auto ex = Exponents::of(*make_torus(1, 2 * pi, 16, 0.3));
    CHECK(rel(ex.critical, 5.0) < 1e-15);
    CHECK(rel(ex.conformal, 4.0) < 1e-15);
    CHECK(rel(ex.beta, 3.0) < 1e-15);
    CHECK(rel(ex.sobolev, 0.4) < 1e-15);
    CHECK(rel(ex.dual(), 1.0 / 0.8) < 1e-15);
}

TEST_CASE("curvature of constants") {
    const auto s2 = make_sphere(2, 16, 0.5);
    const auto one = SpectralField::constant(s2, 1.0);
    CHECK((curvature_R(one).grid_values().array() - 0.5).abs().maxCoeff() < 1e-12);
    CHECK(std::abs(mean_curvature_s(one) - 0.5) < 1e-12);
    CHECK(rel(energy_E(one), 0.5 * std::sqrt(4 * pi)) < 1e-12);

    const auto t = make_torus(1, 2 * pi, 32, 0.3);
    const auto c = SpectralField::constant(t, 2.0);
    CHECK(curvature_R(c).grid_values().cwiseAbs().maxCoeff() < 1e-14);
    CHECK(mean_curvature_s(c) == doctest::Approx(0.0));
}

TEST_CASE("curvature against the closed form for a band-limited factor") {
    // u = 1 + 0.1 cos x has P u = 0.1 cos x exactly at γ = 0.3, period 2π.
    const auto t = make_torus(1, 2 * pi, 64, 0.3);
    const auto u = fftest::cosine_torus(t, 0.1);
    const auto R = curvature_R(u);
    for (std::size_t i = 0; i < t->grid().size(); ++i) {
        const double x = t->grid().nodes[i][0];
        const double exact = std::pow(1 + 0.1 * std::cos(x), -4.0) * 0.1 * std::cos(x);
        CHECK(std::abs(R.grid_values()[static_cast<Eigen::Index>(i)] - exact) < 1e-10);
    }

    // Moments against a dense independent trapezoid rule.
    const int M = 4096;
    double V = 0, Q = 0;
    std::vector<double> Rv(M), dm(M);
    for (int i = 0; i < M; ++i) {
        const double x = 2 * pi * i / M;
        const double uu = 1 + 0.1 * std::cos(x);
        dm[i] = std::pow(uu, 5.0) * 2 * pi / M;
        Rv[i] = std::pow(uu, -4.0) * 0.1 * std::cos(x);
        V += dm[i];
        Q += uu * 0.1 * std::cos(x) * 2 * pi / M;
    }
    const double s = Q / V;
    double F2 = 0;
    for (int i = 0; i < M; ++i) F2 += (Rv[i] - s) * (Rv[i] - s) * dm[i];

    CHECK(rel(volume(u), V) < 1e-12);
    CHECK(rel(mean_curvature_s(u), s) < 1e-10);
    CHECK(rel(moments_SqFq(u, 2.0).F, F2) < 1e-10);
    CHECK(rel(energy_E(u), Q / std::pow(V, 0.4)) < 1e-10);
}

TEST_CASE("two expressions for s agree") {
    CounterRng rng(3);
    for (const auto& g : {make_torus(1, 2 * pi, 32, 0.3), make_sphere(2, 12, 0.5), make_sphere(1, 16, 0.25)}) {
        for (int i = 0; i < 10; ++i) {
            const auto u = random_positive_field(g, rng, 0.5);
            const auto smp = sample_curvature(u);
            const double s_r = integrate_fine(*g, smp.R.cwiseProduct(smp.measure.cwiseQuotient(
                                                   g->grid(Geometry::Level::Fine).weights))) / smp.volume;
            CHECK(std::abs(s_r - smp.s) < 1e-10 * std::max(1.0, std::abs(smp.s)));
        }
    }
}

TEST_CASE("energy is scale and rotation invariant") {
    const auto s2 = make_sphere(2, 12, 0.5);
    const auto u = fftest::y10_sphere(s2, 0.5);
    CHECK(rel(energy_E(u * 3.7), energy_E(u)) < 1e-12);

    const std::array<double, 3> a{0.3, -0.2, 0.5};
    const std::array<double, 3> b{0.1, 0.6, -0.3};
    const double c = std::cos(0.9), sn = std::sin(0.9), c2 = std::cos(0.4), s2n = std::sin(0.4);
    auto field = [&](bool rotate) {
        return fftest::sampled(s2, [&, rotate](const Point& x) {
            auto y = s2->embed(x);
            if (rotate) {
                // rotation about z by 0.9 then about x by 0.4
                const std::array<double, 3> r1{c * y[0] - sn * y[1], sn * y[0] + c * y[1], y[2]};
                y = {r1[0], c2 * r1[1] - s2n * r1[2], s2n * r1[1] + c2 * r1[2]};
            }
            const double da = a[0] * y[0] + a[1] * y[1] + a[2] * y[2];
            const double db = b[0] * y[0] + b[1] * y[1] + b[2] * y[2];
            return 1.0 + da + db * db;
        });
    };
    CHECK(rel(energy_E(field(true)), energy_E(field(false))) < 1e-10);
    CHECK_THROWS_AS(energy_E(SpectralField::zero(s2)), ZeroFieldError);
}

TEST_CASE("moments of constants and sign changes") {
    const auto s2 = make_sphere(2, 12, 0.5);
    for (double q : {1.0, 2.0, 1.5}) {
        const auto m = moments_SqFq(SpectralField::constant(s2, 1.0), q);
        CHECK(rel(m.S, std::pow(0.5, q) * 4 * pi) < 1e-12);
        CHECK(m.F < 1e-12);
        CHECK_FALSE(m.used_absolute);
    }
    const auto t = make_torus(1, 2 * pi, 32, 0.3);
    const auto u = fftest::cosine_torus(t, 0.5);
    CHECK(moments_SqFq(u, 1.5).used_absolute);
    CHECK_FALSE(moments_SqFq(u, 2.0).used_absolute);
}

TEST_CASE("negative factors are rejected with their location") {
    const auto t = make_torus(1, 2 * pi, 32, 0.3);
    const auto u = fftest::sampled(t, [](const Point& x) { return std::cos(x[0]); });
    try {
        sample_curvature(u);
        FAIL("expected PositivityError");
    } catch (const PositivityError& e) {
        CHECK(e.min_value() < 0.0);
        const auto& nodes = t->grid(Geometry::Level::Fine).nodes;
        CHECK(std::abs(nodes[e.node()][0] - pi) < 0.1);
    }
}

TEST_CASE("Hoelder comparison holds") {
    CounterRng rng(17);
    for (const auto& g : {make_torus(1, 2 * pi, 32, 0.3), make_sphere(2, 12, 0.5)}) {
        for (int i = 0; i < 50; ++i) {
            CHECK(holder_slack(random_positive_field(g, rng, 0.6)) >= -1e-12);
        }
    }
}

TEST_CASE("Stroock-Varopoulos") {
    const auto t = make_torus(1, 2 * pi, 64, 0.4);
    // p = 2 is an identity.
    CounterRng rng(23);
    for (int i = 0; i < 10; ++i) {
        const auto f = random_positive_field(t, rng, 0.5);
        CHECK(std::abs(stroock_varopoulos_slack(f, 2.0)) < 1e-12 * fraclap::quadratic_form(f) + 1e-15);
    }
    CHECK(stroock_varopoulos_slack(fftest::cosine_torus(t, 0.3), 3.0) >= 0.0);

    const auto s2 = make_sphere(2, 12, 0.5);
    for (int i = 0; i < 100; ++i) {
        const auto& g = (i % 2 == 0) ? t : s2;
        const auto f = random_positive_field(g, rng, 0.7);
        const double p = rng.uniform(1.05, 4.0);
        CHECK(stroock_varopoulos_slack(f, p) >= -1e-10 * std::max(1.0, fraclap::quadratic_form(f)));
    }
    // On constants the slack is λ0 c^p vol (1 − 4(p−1)/p²).
    const double p = 3.0;
    const double expected = 0.5 * std::pow(2.0, p) * 4 * pi * (1 - 4 * (p - 1) / (p * p));
    CHECK(rel(stroock_varopoulos_slack(SpectralField::constant(s2, 2.0), p), expected) < 1e-12);
    CHECK_THROWS_AS(stroock_varopoulos_slack(SpectralField::constant(s2, 1.0), 5.0), RangeError);
}

TEST_CASE("conformal pairing is symmetric") {
    CounterRng rng(29);
    for (const auto& g : {make_torus(1, 2 * pi, 32, 0.3), make_sphere(2, 12, 0.5)}) {
        for (int i = 0; i < 20; ++i) {
            const auto u = random_positive_field(g, rng, 0.5);
            const auto v = random_field(g, rng, 1.0);
            const auto w = random_field(g, rng, 1.0);
            const double a = conformal_pairing(u, v, w);
            const double b = conformal_pairing(u, w, v);
            CHECK(std::abs(a - b) < 1e-9 * std::max(1.0, std::abs(a)));
        }
    }
}

TEST_CASE("first variation of E") {
    CounterRng rng(31);
    for (const auto& g : {make_torus(1, 2 * pi, 32, 0.3), make_sphere(2, 12, 0.5)}) {
        const auto u = random_positive_field(g, rng, 0.4);
        const auto h = random_field(g, rng, 1.0);
        const double t = 1e-5;
        const double fd = (energy_E(u + t * h) - energy_E(u - t * h)) / (2 * t);
        const double an = inner(energy_gradient(u), h);
        CHECK(std::abs(fd - an) < 1e-6 * std::max(1.0, std::abs(an)));
        CHECK(energy_gradient(SpectralField::constant(g, 1.3)).coeffs().norm() < 1e-8);
    }
}

TEST_CASE("pointwise inequalities") {
    CounterRng rng(37);
    for (int kind = 1; kind <= 3; ++kind) {
        for (double p : {1.2, 2.0, 2.5, 3.5}) {
            if ((kind == 2 && p <= 1.0) || (kind == 3 && p <= 2.0)) continue;
            const double C = pointwise::constant(kind, p);
            double worst = 1.0;
            for (int i = 0; i < 100000; ++i) {
                const double a = std::exp(rng.uniform(-6.0, 2.3));
                const double b = std::exp(rng.uniform(-6.0, 2.3));
                worst = std::min(worst, pointwise::slack(kind, p, a, b, C));
            }
            CHECK(worst >= -1e-12);
        }
    }
}
