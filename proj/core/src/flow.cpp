#include "fracflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "fracflow/fraclap.hpp"

namespace fracflow {

namespace {

void check_positive(const Eigen::VectorXd& fine, double floor) {
    Eigen::Index where = 0;
    const double mn = fine.minCoeff(&where);
    if (!(mn > floor)) {
        std::ostringstream msg;
        msg << "flow lost positivity: min u " << mn << " at fine node " << where;
        throw PositivityError(msg.str(), mn, static_cast<std::size_t>(where));
    }
}

// (s − R)u = −c̄ P u + G(u) with G(u) = s u − (u^{−β} − c̄) P u and c̄ frozen per step.
Eigen::VectorXd explicit_part(const SpectralField& u, double cbar, const Exponents& ex,
                              double floor) {
    const Geometry& geom = u.geometry();
    const Eigen::VectorXd uf = u.fine_values();
    check_positive(uf, floor);
    const Eigen::VectorXd pu = fraclap::apply_P(u).fine_values();
    const double vol = integrate_fine(geom, uf.array().pow(ex.critical).matrix());
    const double s = fraclap::quadratic_form(u) / vol;
    const Eigen::ArrayXd weight = uf.array().pow(-ex.beta) - cbar;
    const Eigen::VectorXd g = (s * uf.array() - weight * pu.array()).matrix();
    return geom.to_coeffs(g, Geometry::Level::Fine);
}

double frozen_coefficient(const SpectralField& u, const Exponents& ex) {
    const Geometry& geom = u.geometry();
    return integrate_fine(geom, u.fine_values().array().pow(-ex.beta).matrix()) /
           geom.background_volume();
}

// Raw IMEX predictor-corrector (Crank–Nicolson on c̄P, Heun on G); no rescale.
SpectralField imex(const SpectralField& u, double dt, const Exponents& ex, double floor) {
    const Geometry& geom = u.geometry();
    const Eigen::VectorXd& lam = geom.symbol();
    const double cbar = frozen_coefficient(u, ex);
    const Eigen::VectorXd g0 = explicit_part(u, cbar, ex, floor);
    const Eigen::ArrayXd full = 1.0 + dt * cbar * lam.array();
    const Eigen::VectorXd pred = ((u.coeffs() + dt * g0).array() / full).matrix();
    const SpectralField up(u.geometry_ptr(), pred);
    const Eigen::VectorXd g1 = explicit_part(up, cbar, ex, floor);
    const Eigen::ArrayXd half = 0.5 * dt * cbar * lam.array();
    const Eigen::ArrayXd rhs =
        u.coeffs().array() * (1.0 - half) + 0.5 * dt * (g0 + g1).array();
    return SpectralField(u.geometry_ptr(), (rhs / (1.0 + half)).matrix());
}

SpectralField rescale_to(const SpectralField& u, double target, const Exponents& ex,
                         double* drift) {
    const double vol = volume(u);
    if (drift != nullptr) {
        *drift = std::abs(vol - target) / target;
    }
    return u * std::pow(target / vol, 1.0 / ex.critical);
}

FunctionalReport diagnostics(const SpectralField& u, const Exponents& ex,
                             const std::vector<double>& extra_q, double floor) {
    return report(sample_curvature(u, floor), ex, extra_q);
}

DiagnosticsRow make_row(double t, const FunctionalReport& r, double dual, double dt_used,
                        int accepted) {
    DiagnosticsRow row;
    row.t = t;
    row.s = r.s;
    row.E = r.E;
    row.vol = r.volume;
    row.F2 = r.Fq.at(2.0);
    row.Fp = r.Fq.at(dual);
    row.minR = r.minR;
    row.maxR = r.maxR;
    row.minU = r.minU;
    row.maxU = r.maxU;
    row.dt_used = dt_used;
    row.step_accepted = accepted;
    return row;
}

void check_blowup(const SpectralField& u, double limit) {
    const double mx = u.fine_values().maxCoeff();
    if (!(mx <= limit)) {
        std::ostringstream msg;
        msg << "flow blew up: max u = " << mx;
        throw BlowupError(msg.str());
    }
}

}  // namespace

FlowState make_state(const SpectralField& u0, double dt0) {
    return FlowState{0.0, u0, dt0, report(u0)};
}

FlowState step(const FlowState& state, double dt, std::optional<double> target_volume,
               double* drift, double positivity_floor) {
    if (!(dt > 0.0)) {
        throw StepFailure("step size must be positive");
    }
    const auto ex = Exponents::of(state.u.geometry());
    const double target = target_volume.value_or(state.report.volume);
    const SpectralField raw = imex(state.u, dt, ex, positivity_floor);
    const SpectralField u = rescale_to(raw, target, ex, drift);
    return FlowState{state.t + dt, u, dt, report(sample_curvature(u, positivity_floor), ex)};
}

DiagnosticsSeries run(const SpectralField& u0, double t_end, double dt0, double tol,
                      const FlowOptions& opt) {
    if (!(t_end > 0.0) || !(dt0 > 0.0)) {
        throw StepFailure("run needs t_end > 0 and dt0 > 0");
    }
    const Geometry& geom = u0.geometry();
    const auto ex = Exponents::of(geom);
    const double dual = ex.dual();
    const double floor = opt.positivity * u0.fine_values().minCoeff();

    auto series = std::make_shared<DiagnosticsSeries>();
    series->n = geom.dimension();
    series->gamma = geom.gamma();
    series->extra_q = opt.extra_q;

    auto record = [&](double t, const FunctionalReport& r, double dt_used, int accepted) {
        series->rows.push_back(make_row(t, r, dual, dt_used, accepted));
        std::vector<double> extra;
        for (double q : opt.extra_q) {
            extra.push_back(r.Fq.at(q));
        }
        series->extra_F.push_back(std::move(extra));
    };

    FunctionalReport rep = diagnostics(u0, ex, opt.extra_q, floor);
    // S_{q−1}(0) feeds the bound on ∫F_q dt, so record it for every extra exponent.
    std::vector<double> initial_q = opt.extra_q;
    for (double q : opt.extra_q) {
        if (q - 1.0 >= 1.0) {
            initial_q.push_back(q - 1.0);
        }
    }
    series->initial = diagnostics(u0, ex, initial_q, floor);
    record(0.0, rep, 0.0, 0);
    const double vol0 = rep.volume;

    SpectralField u = u0;
    double t = 0.0;
    double dt = std::min(dt0, opt.dt_max);
    int halvings = 0;

    auto fail = [&](const std::string& why) -> void {
        series->final_u = u;
        throw RunStepFailure(why, series);
    };

    if (rep.sup_R_minus_s < opt.tol_conv) {
        series->status = RunStatus::Converged;
        series->final_u = u;
        return *series;
    }

    while (t < t_end * (1.0 - 1e-14)) {
        const double h = std::min(dt, t_end - t);
        std::optional<SpectralField> next;
        double drift = 0.0;
        double grow = 1.0;
        try {
            if (opt.adaptive) {
                const SpectralField big = imex(u, h, ex, floor);
                const SpectralField mid = imex(u, 0.5 * h, ex, floor);
                const SpectralField fine = imex(mid, 0.5 * h, ex, floor);
                const double scale = std::max(1.0, fine.grid_values().cwiseAbs().maxCoeff());
                const double err =
                    (fine.grid_values() - big.grid_values()).cwiseAbs().maxCoeff() / scale;
                const double target = tol * h;
                if (err > target) {
                    ++series->rejected_steps;
                    dt = h * std::max(0.2, 0.9 * std::sqrt(target / err));
                    if (dt < opt.dt_min) {
                        fail("step size underflow in error control");
                    }
                    continue;
                }
                grow = err > 0.0 ? std::min(2.0, 0.9 * std::sqrt(target / err)) : 2.0;
                next = rescale_to(fine, vol0, ex, &drift);
            } else {
                next = rescale_to(imex(u, h, ex, floor), vol0, ex, &drift);
            }
            check_blowup(*next, opt.blowup);
            rep = diagnostics(*next, ex, opt.extra_q, floor);
        } catch (const PositivityError& e) {
            ++series->rejected_steps;
            if (++halvings > opt.max_halvings) {
                fail(std::string("positivity retries exhausted: ") + e.what());
            }
            dt = 0.5 * h;
            continue;
        } catch (const BlowupError& e) {
            series->final_u = u;
            throw RunBlowup(e.what(), series);
        }

        if (rep.s > series->rows.back().s + opt.s_slack) {
            ++series->rejected_steps;
            if (++halvings > opt.max_halvings) {
                fail("s increased across a step after repeated halving");
            }
            dt = 0.5 * h;
            continue;
        }

        halvings = 0;
        u = *next;
        t += h;
        series->pre_rescale_drift.push_back(drift);
        record(t, rep, h, 1);
        if (rep.sup_R_minus_s < opt.tol_conv) {
            series->status = RunStatus::Converged;
            break;
        }
        if (opt.adaptive) {
            // A step shortened to hit t_end does not shrink the next proposal.
            dt = std::min(opt.dt_max, std::max(h, dt) * grow);
        }
    }
    series->final_u = u;
    return *series;
}

std::vector<double> positivity_floor(const DiagnosticsSeries& series, double s0, double minR0) {
    const double rate = 4.0 * series.gamma / (series.n - 2.0 * series.gamma) * s0;
    std::vector<double> out;
    out.reserve(series.rows.size());
    for (const auto& row : series.rows) {
        out.push_back(row.minR - std::exp(-rate * row.t) * minR0);
    }
    return out;
}

std::pair<double, double> fq_integral_bound(const DiagnosticsSeries& series, double q) {
    const double n = series.n;
    const double g = series.gamma;
    if (!(q >= 1.0) || !(q < n / (2.0 * g))) {
        throw RangeError("fq_integral_bound needs 1 <= q < n/(2 gamma)");
    }
    const double dual = 2.0 * n / (n + 2.0 * g);
    const double p = q + 1.0;
    std::function<double(std::size_t)> column;
    if (p == 2.0) {
        column = [&](std::size_t i) { return series.rows[i].F2; };
    } else if (p == dual) {
        column = [&](std::size_t i) { return series.rows[i].Fp; };
    } else {
        const auto it = std::find(series.extra_q.begin(), series.extra_q.end(), p);
        if (it == series.extra_q.end()) {
            throw RangeError("F_{q+1} was not recorded in this series");
        }
        const auto k = static_cast<std::size_t>(it - series.extra_q.begin());
        column = [&series, k](std::size_t i) { return series.extra_F[i][k]; };
    }
    const auto sq = series.initial.Sq.find(q);
    if (sq == series.initial.Sq.end()) {
        throw RangeError("S_q(0) was not recorded in this series");
    }
    double lhs = 0.0;
    for (std::size_t i = 1; i < series.rows.size(); ++i) {
        lhs += 0.5 * (series.rows[i].t - series.rows[i - 1].t) * (column(i) + column(i - 1));
    }
    const double rhs = (n - 2.0 * g) / (2.0 * (n - 2.0 * g * q)) * sq->second;
    return {lhs, rhs};
}

}  // namespace fracflow
