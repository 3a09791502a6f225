#include "fracflow/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <numbers>
#include <ostream>

#include "fracflow/bubbles.hpp"
#include "fracflow/errors.hpp"
#include "fracflow/fraclap.hpp"
#include "fracflow/functionals.hpp"
#include "fracflow/random_fields.hpp"
#include "fracflow/series_io.hpp"
#include "fracflow/stability.hpp"

namespace fracflow {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const CommandOptions& opt, const std::string& name) {
    fs::create_directories(opt.out_dir);
    const fs::path path = fs::path(opt.out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ConfigError("out", "cannot write " + path.string());
    }
    return out;
}

std::uint64_t effective_seed(const RunConfig& c, const CommandOptions& opt) {
    return opt.seed.value_or(c.seed);
}

const char* status_name(RunStatus s) {
    return s == RunStatus::Converged ? "converged" : "completed";
}

FlowOptions flow_options(const RunConfig& c) {
    FlowOptions o;
    o.dt_max = c.integrator.dt_max;
    o.tol_conv = c.integrator.tol_conv;
    o.adaptive = c.integrator.adaptive;
    return o;
}

ReportEntries summarize(const RunConfig& c, const DiagnosticsSeries& series, std::uint64_t seed,
                        const std::string& outcome) {
    const auto mc = model_constants(c.geometry.n, c.geometry.gamma);
    // Sphere runs compare against the sphere's own Yamabe constant; flat tori have Y = 0.
    const double y_m = c.geometry.kind == GeometryKind::Sphere ? mc.Y_sphere : 0.0;
    const double threshold = threshold_s0(y_m, mc);
    const auto& last = series.rows.back();
    ReportEntries e{
        {"seed", std::to_string(seed)},
        {"status", outcome},
        {"rows", std::to_string(series.rows.size())},
        {"rejected_steps", std::to_string(series.rejected_steps)},
        {"final_t", format_double(last.t)},
        {"final_s", format_double(last.s)},
        {"final_E", format_double(last.E)},
        {"final_vol", format_double(last.vol)},
        {"final_sup_R_minus_s", format_double(std::max(last.maxR - last.s, last.s - last.minR))},
        {"E0", format_double(series.rows.front().E)},
        {"threshold_s0", format_double(threshold)},
        {"below_threshold", series.rows.front().E <= threshold ? "true" : "false"},
        {"aubin_holds", aubin_holds(last.E, mc) ? "true" : "false"},
    };
    if (series.final_u) {
        try {
            const auto conc = detect_concentration(*series.final_u, mc);
            e.emplace_back("L_est", format_double(conc.L_est));
            e.emplace_back("L_near_integer", conc.near_integer ? "true" : "false");
            e.emplace_back("eps_est", conc.eps_est ? format_double(*conc.eps_est) : "none");
        } catch (const FitError& err) {
            e.emplace_back("L_est", std::string("fit_failed (") + err.what() + ")");
        }
    }
    return e;
}

template <class F>
VerifyCheck upper_check(const std::string& name, double tol, F&& worst) {
    VerifyCheck c;
    c.name = name;
    c.tolerance = tol;
    c.value = worst();
    c.pass = c.value <= tol;
    return c;
}

}  // namespace

VerifyTolerances verify_tolerances(int truncation) {
    VerifyTolerances t;
    if (truncation < 8) {
        t.transform = 1e-8;
        t.self_adjoint = 1e-8;
        t.stroock = 1e-8;
    }
    return t;
}

DiagnosticsSeries run_configured_flow(const RunConfig& c) {
    const auto geom = build_geometry(c.geometry);
    const auto u0 = build_initial(geom, c);
    return run(u0, c.integrator.t_end, c.integrator.dt0, c.integrator.tol, flow_options(c));
}

int cmd_flow(const RunConfig& c, const CommandOptions& opt, std::ostream& log) {
    const std::uint64_t seed = effective_seed(c, opt);
    DiagnosticsSeries series;
    std::string outcome;
    int code = 0;
    try {
        series = run_configured_flow(c);
        outcome = status_name(series.status);
    } catch (const RunStepFailure& e) {
        series = e.partial();
        outcome = std::string("step_failure: ") + e.what();
        code = 2;
    } catch (const RunBlowup& e) {
        series = e.partial();
        outcome = std::string("blowup: ") + e.what();
        code = 3;
    }
    {
        auto csv = open_out(opt, c.output.csv);
        write_csv(csv, series, seed, c.output.stride);
    }
    {
        auto rep = open_out(opt, c.output.report);
        write_report(rep, summarize(c, series, seed, outcome));
    }
    if (!opt.quiet) {
        log << "flow: " << outcome << ", " << series.rows.size() << " rows, final s "
            << format_double(series.rows.back().s) << '\n';
    }
    return code;
}

int cmd_spectrum(const RunConfig& c, const CommandOptions& opt, std::ostream& log) {
    const auto geom = build_geometry(c.geometry);
    auto out = open_out(opt, "spectrum.csv");
    if (!c.spectrum.weighted) {
        out << "k,multiplier\n";
        for (int k = 0; k <= geom->truncation(); ++k) {
            out << k << ',' << format_double(fraclap::multiplier(*geom, k)) << '\n';
        }
    } else {
        SpectralField u_inf = build_initial(geom, c);
        if (!c.spectrum.u_inf.empty()) {
            const auto v = read_values(c.spectrum.u_inf);
            if (v.size() != geom->grid().size()) {
                throw ConfigError("u_inf", "grid value count does not match the geometry");
            }
            u_inf = SpectralField::from_grid(
                geom, Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
        }
        const auto spectrum = weighted_eigs(u_inf, c.spectrum.count);
        out << "a,lambda\n";
        for (std::size_t a = 0; a < spectrum.pairs.size(); ++a) {
            out << a << ',' << format_double(spectrum.pairs[a].lambda) << '\n';
        }
    }
    if (!opt.quiet) {
        log << "spectrum written to " << (fs::path(opt.out_dir) / "spectrum.csv").string() << '\n';
    }
    return 0;
}

std::vector<VerifyCheck> verify_battery(const RunConfig& c, std::uint64_t seed) {
    const auto tol = verify_tolerances(c.geometry.truncation);
    const auto geom = build_geometry(c.geometry);
    const CounterRng root(seed, 0x5EED);
    std::vector<VerifyCheck> checks;

    checks.push_back(upper_check("transform_round_trip", tol.transform, [&] {
        CounterRng rng = root.split(1);
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const SpectralField f = random_field(geom, rng);
            const Eigen::VectorXd back = geom->to_coeffs(f.grid_values());
            worst = std::max(worst, (back - f.coeffs()).norm() / f.coeffs().norm());
        }
        return worst;
    }));

    checks.push_back(upper_check("parseval", tol.transform, [&] {
        CounterRng rng = root.split(2);
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const SpectralField f = random_field(geom, rng);
            const double grid = geom->grid().weights.dot(f.grid_values().cwiseAbs2());
            const double coef = f.coeffs().squaredNorm();
            worst = std::max(worst, std::abs(grid - coef) / coef);
        }
        return worst;
    }));

    checks.push_back(upper_check("self_adjointness", tol.self_adjoint, [&] {
        CounterRng rng = root.split(3);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const SpectralField v = random_field(geom, rng);
            const SpectralField w = random_field(geom, rng);
            const double gap = std::abs(fraclap::pairing(v, w) - fraclap::pairing(w, v));
            worst = std::max(worst, gap / (v.coeffs().norm() * w.coeffs().norm()));
        }
        return worst;
    }));

    checks.push_back(upper_check("quadratic_form_nonnegative", 0.0, [&] {
        CounterRng rng = root.split(4);
        double worst = 0.0;
        for (int i = 0; i < 50; ++i) {
            worst = std::max(worst, -fraclap::quadratic_form(random_field(geom, rng)));
        }
        return worst;
    }));

    checks.push_back(upper_check("stroock_varopoulos", tol.stroock, [&] {
        CounterRng rng = root.split(5);
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            const SpectralField f = random_positive_field(geom, rng);
            for (double p : {1.5, 2.0, 3.0}) {
                const double scale = std::max(fraclap::quadratic_form(f), 1e-300);
                worst = std::max(worst, -stroock_varopoulos_slack(f, p) / scale);
            }
        }
        return worst;
    }));

    checks.push_back(upper_check("extension_calibration", tol.calibration, [&] {
        const double g = c.geometry.gamma;
        const auto torus = make_torus(g < 0.5 ? 1 : 2, 2.0 * std::numbers::pi, 16, g);
        const auto cal = fraclap::calibrate_cgamma(*torus, 8, 1.0);
        const double oracle =
            std::pow(2.0, 2.0 * g - 1.0) * std::tgamma(g) / std::tgamma(1.0 - g);
        return std::max(cal.max_relative_spread, std::abs(cal.c_gamma - oracle) / oracle);
    }));

    checks.push_back(upper_check("sphere_gap_sweep", 0.0, [&] {
        double worst = -1e300;
        for (int n : {1, 2}) {
            const double hi = std::min(1.0, 0.5 * n) - 0.05;
            for (int i = 0; i < 50; ++i) {
                const double g = 0.05 + (hi - 0.05) * i / 49.0;
                worst = std::max(worst, -sphere_gap_margin(n, g));
            }
        }
        return worst;
    }));

    checks.push_back(upper_check("aubin", 1e-8, [&] {
        const auto mc = model_constants(c.geometry.n, c.geometry.gamma);
        const double y_est = energy_E(SpectralField::constant(geom, 1.0));
        return y_est - mc.Y_sphere;
    }));

    checks.push_back(upper_check("pointwise_oracles", 0.0, [&] {
        CounterRng rng = root.split(6);
        double worst = 0.0;
        const std::pair<int, double> cases[] = {{1, 1.2}, {1, 2.0}, {1, 2.5}, {1, 3.5},
                                                {2, 1.2}, {2, 2.0}, {2, 2.5}, {2, 3.5},
                                                {3, 2.5}, {3, 3.5}};
        for (const auto& [kind, p] : cases) {
            const double C = pointwise::constant(kind, p);
            for (int i = 0; i < 10000; ++i) {
                const double a = rng.uniform(1e-9, 10.0);
                const double b = rng.uniform(1e-9, 10.0);
                worst = std::max(worst, -pointwise::slack(kind, p, a, b, C));
            }
        }
        return worst;
    }));

    checks.push_back(upper_check("s_average_identity", 1e-10, [&] {
        CounterRng rng = root.split(7);
        const SpectralField u = random_positive_field(geom, rng);
        const auto sample = sample_curvature(u);
        const double direct = sample.measure.dot(sample.R) / sample.volume;
        return std::abs(direct - sample.s) / std::max(std::abs(sample.s), 1e-300);
    }));
    return checks;
}

int cmd_verify(const RunConfig& c, const CommandOptions& opt, std::ostream& log) {
    const auto checks = verify_battery(c, effective_seed(c, opt));
    auto out = open_out(opt, "verify.txt");
    bool all = true;
    for (const auto& ch : checks) {
        all = all && ch.pass;
        const std::string line = std::string(ch.pass ? "PASS " : "FAIL ") + ch.name +
                                 " value=" + format_double(ch.value) +
                                 " tol=" + format_double(ch.tolerance);
        out << line << '\n';
        if (!opt.quiet) {
            log << line << '\n';
        }
    }
    return all ? 0 : 1;
}

int cmd_bubble(const RunConfig& c, const CommandOptions& opt, std::ostream& log) {
    const auto geom = build_geometry(c.geometry);
    const auto u = build_initial(geom, c);
    const auto mc = model_constants(c.geometry.n, c.geometry.gamma);
    ReportEntries e{
        {"seed", std::to_string(effective_seed(c, opt))},
        {"alpha", format_double(mc.alpha)},
        {"alpha_bar", format_double(mc.alpha_bar)},
        {"green_const", format_double(mc.green_const)},
        {"Y_sphere", format_double(mc.Y_sphere)},
        {"bubble_volume", format_double(bubble_volume(mc))},
        {"E", format_double(energy_E(u))},
    };
    int code = 0;
    try {
        const auto conc = detect_concentration(u, mc);
        e.emplace_back("L_est", format_double(conc.L_est));
        e.emplace_back("L_near_integer", conc.near_integer ? "true" : "false");
        e.emplace_back("eps_est", conc.eps_est ? format_double(*conc.eps_est) : "none");
        if (conc.center_est) {
            e.emplace_back("center_est", format_double((*conc.center_est)[0]) + " " +
                                             format_double((*conc.center_est)[1]));
        }
    } catch (const FitError& err) {
        e.emplace_back("L_est", std::string("fit_failed (") + err.what() + ")");
        code = 1;
    }
    auto out = open_out(opt, "bubble.txt");
    write_report(out, e);
    if (!opt.quiet) {
        write_report(log, e);
    }
    return code;
}

int cmd_sweep(const RunConfig& c, const CommandOptions& opt, std::ostream& log) {
    if (c.sweep_gammas.empty()) {
        throw ConfigError("gammas", "sweep needs at least one gamma");
    }
    const std::uint64_t seed = effective_seed(c, opt);
    fs::create_directories(opt.out_dir);
    std::vector<std::future<std::pair<std::string, int>>> jobs;
    for (double g : c.sweep_gammas) {
        RunConfig job = c;
        job.geometry.gamma = g;
        jobs.push_back(std::async(std::launch::async, [job, seed, &opt] {
            const std::string name = "sweep_gamma_" + format_double(job.geometry.gamma) + ".csv";
            int code = 0;
            DiagnosticsSeries series;
            try {
                series = run_configured_flow(job);
            } catch (const RunStepFailure& e) {
                series = e.partial();
                code = 2;
            } catch (const RunBlowup& e) {
                series = e.partial();
                code = 3;
            }
            std::ofstream out(fs::path(opt.out_dir) / name, std::ios::binary);
            write_csv(out, series, seed, job.output.stride);
            return std::make_pair(name, code);
        }));
    }
    int worst = 0;
    for (auto& j : jobs) {
        const auto [name, code] = j.get();
        worst = std::max(worst, code);
        if (!opt.quiet) {
            log << "sweep: " << name << (code == 0 ? " ok" : " failed") << '\n';
        }
    }
    return worst;
}

}  // namespace fracflow
