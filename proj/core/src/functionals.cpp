#include "fracflow/functionals.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "fracflow/errors.hpp"
#include "fracflow/fraclap.hpp"

namespace fracflow {

Exponents Exponents::of(const Geometry& geom) {
    const double n = geom.dimension();
    const double g = geom.gamma();
    return {n, g, 2.0 * n / (n - 2.0 * g), (n + 2.0 * g) / (n - 2.0 * g), 4.0 * g / (n - 2.0 * g),
            (n - 2.0 * g) / n};
}

namespace {

void require_positive(const Geometry& geom, const Eigen::VectorXd& fine, double floor,
                      const char* what) {
    Eigen::Index where = 0;
    const double mn = fine.minCoeff(&where);
    if (!(mn > floor)) {
        const auto& node = geom.grid(Geometry::Level::Fine).nodes[static_cast<std::size_t>(where)];
        std::ostringstream msg;
        msg << what << " is not positive: min " << mn << " at fine node " << where << " ("
            << node[0] << ", " << node[1] << ")";
        throw PositivityError(msg.str(), mn, static_cast<std::size_t>(where));
    }
}

Eigen::VectorXd pow_abs(const Eigen::VectorXd& v, double p) {
    return v.array().abs().pow(p).matrix();
}

}  // namespace

CurvatureSample sample_curvature(const SpectralField& u, double floor) {
    const Geometry& geom = u.geometry();
    const auto ex = Exponents::of(geom);
    CurvatureSample out;
    out.u = u.fine_values();
    require_positive(geom, out.u, floor, "conformal factor u");
    const SpectralField pu = fraclap::apply_P(u);
    out.Pu = pu.fine_values();
    out.R = out.u.array().pow(-ex.conformal).matrix().cwiseProduct(out.Pu);
    out.measure = geom.grid(Geometry::Level::Fine)
                      .weights.cwiseProduct(out.u.array().pow(ex.critical).matrix());
    out.quadratic = fraclap::quadratic_form(u);
    out.volume = out.measure.sum();
    out.s = out.quadratic / out.volume;
    out.min_u = out.u.minCoeff();
    out.max_u = out.u.maxCoeff();
    return out;
}

SpectralField curvature_R(const SpectralField& u) {
    const auto sample = sample_curvature(u);
    return project_fine(u.geometry_ptr(), sample.R);
}

double mean_curvature_s(const SpectralField& u) { return sample_curvature(u).s; }

double volume(const SpectralField& u) {
    const auto ex = Exponents::of(u.geometry());
    return integrate_fine(u.geometry(), pow_abs(u.fine_values(), ex.critical));
}

double energy_E(const SpectralField& u) {
    const auto ex = Exponents::of(u.geometry());
    const Eigen::VectorXd fine = u.fine_values();
    const double vol = integrate_fine(u.geometry(), pow_abs(fine, ex.critical));
    if (!(vol > 0.0)) {
        throw ZeroFieldError("energy_E of the zero field is undefined");
    }
    return fraclap::quadratic_form(u) / std::pow(vol, ex.sobolev);
}

SpectralField energy_gradient(const SpectralField& u) {
    const auto ex = Exponents::of(u.geometry());
    const Eigen::VectorXd fine = u.fine_values();
    const double vol = integrate_fine(u.geometry(), pow_abs(fine, ex.critical));
    if (!(vol > 0.0)) {
        throw ZeroFieldError("energy gradient of the zero field is undefined");
    }
    const double s = fraclap::quadratic_form(u) / vol;
    const Eigen::VectorXd power =
        fine.array().sign() * fine.array().abs().pow(ex.critical - 1.0);
    const SpectralField pw = project_fine(u.geometry_ptr(), power);
    const Eigen::VectorXd grad =
        2.0 * (u.geometry().symbol().cwiseProduct(u.coeffs()) - s * pw.coeffs()) /
        std::pow(vol, ex.sobolev);
    return SpectralField(u.geometry_ptr(), grad);
}

Moments moments_SqFq(const CurvatureSample& sample, double q) {
    if (!(q >= 1.0)) {
        throw RangeError("moments require q >= 1");
    }
    Moments m;
    const bool integer_q = (q == std::floor(q));
    const bool negative_R = sample.R.minCoeff() < 0.0;
    if (integer_q) {
        m.S = sample.measure.dot(sample.R.array().pow(q).matrix());
    } else {
        m.used_absolute = negative_R;
        m.S = sample.measure.dot(pow_abs(sample.R, q));
    }
    const Eigen::VectorXd dev = (sample.R.array() - sample.s).matrix();
    m.F = sample.measure.dot(pow_abs(dev, q));
    return m;
}

Moments moments_SqFq(const SpectralField& u, double q) {
    return moments_SqFq(sample_curvature(u), q);
}

FunctionalReport report(const CurvatureSample& sample, const Exponents& ex,
                        const std::vector<double>& extra_q) {
    FunctionalReport r;
    r.volume = sample.volume;
    r.s = sample.s;
    r.E = sample.quadratic / std::pow(sample.volume, ex.sobolev);
    r.minR = sample.R.minCoeff();
    r.maxR = sample.R.maxCoeff();
    r.minU = sample.min_u;
    r.maxU = sample.max_u;
    r.sup_R_minus_s = (sample.R.array() - sample.s).abs().maxCoeff();
    std::vector<double> qs{1.0, 2.0, ex.dual()};
    qs.insert(qs.end(), extra_q.begin(), extra_q.end());
    for (double q : qs) {
        const auto m = moments_SqFq(sample, q);
        r.Sq[q] = m.S;
        r.Fq[q] = m.F;
    }
    return r;
}

FunctionalReport report(const SpectralField& u, const std::vector<double>& extra_q) {
    return report(sample_curvature(u), Exponents::of(u.geometry()), extra_q);
}

double stroock_varopoulos_slack(const SpectralField& f, double p) {
    if (!(p > 1.0 && p <= 4.0)) {
        throw RangeError("Stroock-Varopoulos exponent must lie in (1, 4]");
    }
    const Geometry& geom = f.geometry();
    const Eigen::VectorXd fine = f.fine_values();
    require_positive(geom, fine, 0.0, "f");
    const Eigen::VectorXd pf = fraclap::apply_P(f).fine_values();
    const double lhs = integrate_fine(geom, fine.array().pow(p - 1.0).matrix().cwiseProduct(pf));
    const SpectralField half = project_fine(f.geometry_ptr(), fine.array().pow(0.5 * p).matrix());
    const double rhs = 4.0 * (p - 1.0) / (p * p) * fraclap::quadratic_form(half);
    return lhs - rhs;
}

double conformal_pairing(const SpectralField& u, const SpectralField& v, const SpectralField& w) {
    require_same_geometry(u, v);
    require_same_geometry(u, w);
    const Geometry& geom = u.geometry();
    const auto ex = Exponents::of(geom);
    const Eigen::VectorXd uf = u.fine_values();
    require_positive(geom, uf, kPositivityFloor, "conformal factor u");
    const SpectralField uv = project_fine(u.geometry_ptr(), uf.cwiseProduct(v.fine_values()));
    const Eigen::VectorXd p_uv = fraclap::apply_P(uv).fine_values();
    const Eigen::VectorXd pg_v = uf.array().pow(-ex.conformal).matrix().cwiseProduct(p_uv);
    const Eigen::VectorXd dmu =
        geom.grid(Geometry::Level::Fine).weights.cwiseProduct(uf.array().pow(ex.critical).matrix());
    return dmu.dot(pg_v.cwiseProduct(w.fine_values()));
}

double holder_slack(const SpectralField& u) {
    const auto sample = sample_curvature(u);
    const auto ex = Exponents::of(u.geometry());
    const double p = ex.dual();
    const Eigen::VectorXd dev = (sample.R.array() - sample.s).matrix();
    const double fp = sample.measure.dot(pow_abs(dev, p));
    const double f2 = sample.measure.dot(dev.cwiseProduct(dev));
    return std::sqrt(f2) * std::pow(sample.volume, 1.0 / p - 0.5) - std::pow(fp, 1.0 / p);
}

namespace pointwise {

double constant(int kind, double p) {
    struct Entry {
        double p;
        std::array<double, 3> c;  // kinds 1..3; 0 where the inequality does not apply
    };
    static constexpr std::array<Entry, 4> table{{
        {1.2, {2.21, 0.96, 0.0}},
        {2.0, {4.00, 1.01, 0.0}},
        {2.5, {5.32, 3.75, 1.50}},
        {3.5, {10.96, 8.92, 8.80}},
    }};
    for (const auto& e : table) {
        if (e.p == p && kind >= 1 && kind <= 3 && e.c[kind - 1] > 0.0) {
            return e.c[kind - 1];
        }
    }
    throw RangeError("no frozen pointwise constant for this (kind, p)");
}

double slack(int kind, double p, double a, double b, double C) {
    const double h = a - b;
    const double ah = std::abs(h);
    switch (kind) {
    case 1: {
        const double lhs = std::abs(std::pow(a, p) - std::pow(b, p));
        return C * (std::pow(ah, p) + std::pow(a, p - 1.0) * ah) - lhs;
    }
    case 2: {
        const double lhs = std::abs(std::pow(a, p) - std::pow(b, p) - p * std::pow(a, p - 1.0) * h);
        const double rhs =
            std::pow(a, std::max(p - 2.0, 0.0)) * std::pow(ah, std::min(p, 2.0)) + std::pow(ah, p);
        return C * rhs - lhs;
    }
    case 3: {
        const double lhs = std::abs(std::pow(a, p) - std::pow(b, p) - p * std::pow(a, p - 1.0) * h +
                                    0.5 * p * (p - 1.0) * std::pow(b, p - 2.0) * h * h);
        const double rhs =
            std::pow(a, std::max(p - 3.0, 0.0)) * std::pow(ah, std::min(p, 3.0)) + std::pow(ah, p);
        return C * rhs - lhs;
    }
    default:
        throw RangeError("pointwise inequality kind must be 1, 2 or 3");
    }
}

}  // namespace pointwise

}  // namespace fracflow
