// Acceptance criteria: one PASS/FAIL line per criterion, with the measured quantities.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fracflow/bubbles.hpp"
#include "fracflow/commands.hpp"
#include "fracflow/config.hpp"
#include "fracflow/fraclap.hpp"
#include "fracflow/functionals.hpp"
#include "fracflow/random_fields.hpp"
#include "fracflow/stability.hpp"

using namespace fracflow;
namespace fs = std::filesystem;
constexpr double pi = std::numbers::pi;

namespace {

struct Outcome {
    bool pass = true;
    std::vector<std::string> notes;

    void check(bool ok, const char* fmt, auto... args) {
        char buf[256];
        std::snprintf(buf, sizeof buf, fmt, args...);
        notes.push_back(std::string(ok ? "" : "[x] ") + buf);
        pass = pass && ok;
    }
};

SpectralField from_fn(const GeometryPtr& g, const std::function<double(const Point&)>& f) {
    const auto& grid = g->grid();
    Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) v[static_cast<Eigen::Index>(i)] = f(grid.nodes[i]);
    return SpectralField::from_grid(g, v);
}

// The two runs shared by several criteria, computed once.
struct Runs {
    DiagnosticsSeries torus;
    double torus_seconds = 0.0;
    DiagnosticsSeries sphere;
    double sphere_seconds = 0.0;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Runs& runs() {
    static Runs r = [] {
        Runs out;
        auto t0 = std::chrono::steady_clock::now();
        const auto t = make_torus(1, 2 * pi, 64, 0.3);
        out.torus = run(from_fn(t, [](const Point& x) { return 1.0 + 0.1 * std::cos(x[0]); }), 5.0, 1e-3, 1e-4);
        out.torus_seconds = seconds_since(t0);

        t0 = std::chrono::steady_clock::now();
        const auto s = make_sphere(2, 16, 0.5);
        const double y10 = std::sqrt(3.0 / (4.0 * pi));
        out.sphere = run(from_fn(s, [y10](const Point& x) { return 1.0 + 0.05 * y10 * std::cos(x[0]); }), 5.0,
                         1e-3, 1e-4);
        out.sphere_seconds = seconds_since(t0);
        return out;
    }();
    return r;
}

Outcome operator_correctness() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    CounterRng rng(2024);
    struct Case { const char* name; GeometryPtr g; };
    for (const auto& [name, g] : {Case{"torus", make_torus(1, 2 * pi, 64, 0.3)},
                                  Case{"S1", make_sphere(1, 64, 0.3)},
                                  Case{"S2", make_sphere(2, 32, 0.5)}}) {
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const auto v = random_field(g, rng, 0.5);
            const auto w = random_field(g, rng, 0.5);
            const double a = fraclap::pairing(v, w);
            const double b = fraclap::pairing(w, v);
            worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
        }
        o.check(worst <= 1e-10, "%s self-adjointness slack %.2e", name, worst);
    }
    const double secs = seconds_since(t0);
    o.check(secs < 10.0, "runtime %.2fs < 10s", secs);
    return o;
}

Outcome sphere_spectrum() {
    Outcome o;
    double worst = 0.0;
    for (int k = 0; k <= 20; ++k) worst = std::max(worst, std::abs(fraclap::sphere_eigenvalue(2, 0.5, k) - (k + 0.5)));
    o.check(worst <= 1e-12, "max |lambda(k) - (k+1/2)| = %.2e", worst);
    double worst1 = 0.0;
    for (int k = 0; k <= 20; ++k) {
        const double target = k * (k + 1.0);
        worst1 = std::max(worst1, std::abs(fraclap::sphere_eigenvalue(2, 1.0 - 1e-6, k) - target) / std::max(1.0, target));
    }
    o.check(worst1 <= 1e-4, "gamma->1 relative deviation from k(k+1) = %.2e", worst1);
    return o;
}

Outcome extension_crosscheck() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    for (double g : {0.25, 0.5, 0.75}) {
        const auto torus = make_torus(2, 2 * pi, 16, g);
        const auto cal = fraclap::calibrate_cgamma(*torus, 8);
        double worst = 0.0;
        for (int k = 1; k <= 8; ++k) {
            const double flux = fraclap::extension_dtn(*torus, k, 25.0 / k, fraclap::kDefaultExtensionNodes);
            worst = std::max(worst, std::abs(cal.c_gamma * flux - std::pow(k, 2 * g)) / std::pow(k, 2 * g));
        }
        o.check(worst <= 1e-4, "gamma=%.2f calibrated flux vs |k|^2g: %.2e (c=%.8f)", g, worst, cal.c_gamma);
        if (g == 0.5) {
            double exact = 0.0;
            for (int k = 1; k <= 8; ++k) {
                exact = std::max(exact, std::abs(fraclap::extension_dtn(*torus, k, 25.0 / k,
                                                                       fraclap::kDefaultExtensionNodes) - k) / k);
            }
            o.check(exact <= 1e-6, "gamma=0.5 raw flux vs |k|: %.2e", exact);
        }
    }
    const double secs = seconds_since(t0);
    o.check(secs < 30.0, "runtime %.2fs < 30s", secs);
    return o;
}

Outcome dissipation_laws() {
    Outcome o;
    const auto& r = runs();
    const auto& rows = r.torus.rows;
    double vol_drift = 0.0, s_rise = -1e300, mid = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        vol_drift = std::max(vol_drift, std::abs(rows[i].vol - rows[0].vol) / rows[0].vol);
        s_rise = std::max(s_rise, rows[i].s - rows[i - 1].s);
        // ds/dt = −2F₂/vol for a flow that keeps the volume fixed at vol.
        const double dt = rows[i].t - rows[i - 1].t;
        const double f2 = 0.5 * (rows[i].F2 + rows[i - 1].F2);
        const double vol = 0.5 * (rows[i].vol + rows[i - 1].vol);
        const double s = 0.5 * (rows[i].s + rows[i - 1].s);
        mid = std::max(mid, std::abs((rows[i].s - rows[i - 1].s) / dt + 2.0 * f2 / vol) / (std::abs(s) + f2));
    }
    const auto& last = rows.back();
    const double sup = std::max(last.maxR - last.s, last.s - last.minR);
    o.check(vol_drift <= 1e-6, "volume drift %.2e", vol_drift);
    o.check(s_rise <= 1e-9, "largest s increase %.2e", s_rise);
    o.check(mid <= 1e-3, "midpoint identity residual %.2e", mid);
    o.check(sup < 1e-6, "terminal sup|R-s| = %.2e at t=%.3g", sup, last.t);
    o.check(r.torus_seconds < 120.0, "runtime %.2fs < 120s (%zu rows)", r.torus_seconds, rows.size());
    return o;
}

Outcome positivity_floor_check() {
    Outcome o;
    const auto& series = runs().sphere;
    const double s0 = series.rows.front().s;
    const double minR0 = series.rows.front().minR;
    o.check(minR0 > 0.0, "minR(0) = %.6f > 0", minR0);
    const auto slack = positivity_floor(series, s0, minR0);
    double worst = 1e300;
    for (double v : slack) worst = std::min(worst, v + 1e-6 * minR0);
    o.check(worst >= 0.0, "worst floor slack %.2e over %zu rows", worst, slack.size());
    return o;
}

Outcome f_decay() {
    Outcome o;
    const auto& r = runs();
    const auto [lhs, rhs] = fq_integral_bound(r.sphere, 1.0);
    o.check(lhs <= (1 + 1e-3) * rhs, "sphere int F_2 dt = %.3e <= %.3e", lhs, rhs);
    for (const auto* s : {&r.torus, &r.sphere}) {
        const double ratio = s->rows.back().F2 / s->rows.front().F2;
        o.check(ratio < 0.01, "%s F2(end)/F2(0) = %.2e", s == &r.torus ? "torus" : "sphere", ratio);
    }
    return o;
}

Outcome stroock_varopoulos() {
    Outcome o;
    CounterRng rng(77);
    for (const auto& g : {make_torus(1, 2 * pi, 64, 0.3), make_sphere(2, 16, 0.5)}) {
        double worst = 1e300;
        for (int i = 0; i < 100; ++i) {
            const auto f = random_positive_field(g, rng, 0.6);
            for (double p : {1.5, 2.0, 3.0}) worst = std::min(worst, stroock_varopoulos_slack(f, p));
        }
        o.check(worst >= -1e-10, "%s min slack %.2e", g->kind() == GeometryKind::Torus ? "torus" : "S2", worst);
    }
    return o;
}

Outcome sphere_gap() {
    Outcome o;
    double worst = 1e300;
    for (int n : {1, 2}) {
        const double hi = std::min(1.0, 0.5 * n) - 0.05;
        for (int i = 0; i < 2500; ++i) worst = std::min(worst, sphere_gap_margin(n, 0.05 + (hi - 0.05) * i / 2499.0));
        worst = std::min(worst, sphere_gap_margin(n, 1e-3));
    }
    o.check(worst > 0.0, "min margin over sweep %.3e", worst);
    const double lhs = std::exp(std::lgamma(3.5) - std::lgamma(2.5));
    const double rhs = std::pow(2.0, 1.0) * std::exp(std::lgamma(1.5) - std::lgamma(0.5)) * 3.0 * 0.5;
    const double err = std::abs(sphere_gap_margin(2, 0.5) - (lhs - rhs));
    o.check(err <= 1e-12 && std::abs(lhs - rhs - 1.0) <= 1e-12, "n=2, gamma=1/2 margin vs log-Gamma: %.1e", err);
    return o;
}

Outcome coercivity() {
    Outcome o;
    const auto s2 = make_sphere(2, 16, 0.5);
    const auto one = SpectralField::constant(s2, 1.0);
    const auto sp = weighted_eigs(one, 40);
    const auto A = low_mode_set(sp, *s2, mean_curvature_s(one));
    const double c_est = coercivity_gap(sp, A, one, 100, 9);
    const double predicted = 1.0 - A.threshold / fraclap::multiplier(*s2, 2);
    o.check(c_est > 0.0, "c_est = %.12f > 0 (|A| = %zu)", c_est, A.indices.size());
    o.check(std::abs(c_est - predicted) <= 1e-10, "closed-form prediction %.12f, diff %.1e", predicted,
            std::abs(c_est - predicted));
    return o;
}

Outcome bubbling() {
    Outcome o;
    const auto s2 = make_sphere(2, 32, 0.5);
    const auto mc = model_constants(2, 0.5);
    const auto planted = detect_concentration(sphere_bubble(s2, {1.1, 2.0}, 0.2), mc);
    o.check(planted.L_est > 0.9 && planted.L_est < 1.1, "planted bubble L_est = %.6f", planted.L_est);
    const auto& r = runs();
    const auto bg = detect_concentration(r.torus, model_constants(1, 0.3));
    o.check(bg.L_est > -0.1 && bg.L_est < 0.1, "background-only torus run L_est = %.2e", bg.L_est);
    const double Ym = r.sphere.rows.back().E;
    o.check(aubin_holds(Ym, mc), "sphere run Y_M_est = %.10f <= %.10f + 1e-8", Ym, mc.Y_sphere);
    const double Yt = r.torus.rows.back().E;
    o.check(aubin_holds(Yt, model_constants(1, 0.3)), "torus run Y_M_est = %.3e <= Y_sphere", Yt);
    return o;
}

Outcome determinism() {
    Outcome o;
    std::istringstream in("seed = 31\n[geometry]\nkind = torus\nn = 1\ngamma = 0.3\ntruncation = 64\n"
                          "[initial]\ntype = cosine\namplitude = 0.1\n[integrator]\nt_end = 0.5\n");
    const auto cfg = parse_config(in);
    std::string bytes[2];
    for (int i = 0; i < 2; ++i) {
        const fs::path dir = fs::temp_directory_path() / ("fracflow_acceptance_" + std::to_string(i));
        fs::remove_all(dir);
        CommandOptions opt;
        opt.out_dir = dir.string();
        opt.quiet = true;
        std::ostringstream log;
        cmd_flow(cfg, opt, log);
        std::ifstream f(dir / "diagnostics.csv", std::ios::binary);
        std::ostringstream ss;
        ss << f.rdbuf();
        bytes[i] = ss.str();
    }
    o.check(!bytes[0].empty() && bytes[0] == bytes[1], "two runs, %zu bytes each, identical", bytes[0].size());
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
        {"operator correctness", operator_correctness},
        {"sphere spectrum", sphere_spectrum},
        {"extension cross-check", extension_crosscheck},
        {"flow dissipation laws", dissipation_laws},
        {"curvature positivity floor", positivity_floor_check},
        {"F-decay", f_decay},
        {"Stroock-Varopoulos", stroock_varopoulos},
        {"sphere eigenvalue gap", sphere_gap},
        {"coercivity", coercivity},
        {"bubbling bookkeeping", bubbling},
        {"determinism", determinism},
    };
    const auto& shared = runs();
    std::printf("shared runs: torus S1 %.2fs (%zu rows), sphere S2 %.2fs (%zu rows)\n", shared.torus_seconds,
                shared.torus.rows.size(), shared.sphere_seconds, shared.sphere.rows.size());
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.check(false, "threw: %s", e.what());
        }
        const double secs = seconds_since(t0);
        failed += o.pass ? 0 : 1;
        std::printf("%s %2zu %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, secs);
        for (const auto& n : o.notes) std::printf("       %s\n", n.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
