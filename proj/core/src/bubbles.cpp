#include "fracflow/bubbles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fracflow/errors.hpp"
#include "fracflow/fraclap.hpp"
#include "fracflow/functionals.hpp"
#include "fracflow/special.hpp"

namespace fracflow {

namespace {

constexpr double kPi = std::numbers::pi;

double unit_sphere_area(int n) { return n == 1 ? 2.0 * kPi : 4.0 * kPi; }

// Surface measure of the unit sphere in ℝⁿ (the radial Jacobian constant).
double radial_area(int n) { return n == 1 ? 2.0 : 2.0 * kPi; }

double nu_of(const ModelConstants& c) { return 0.5 * (c.n - 2.0 * c.gamma); }

// Fourier transform of (1+|x|²)^{−μ} on ℝⁿ at |k| = k > 0.
double ft_power(int n, double mu, double k) {
    const double order = mu - 0.5 * n;
    if (k > 600.0) {
        return 0.0;  // below e^{-600}; the library Bessel routine refuses such arguments
    }
    const double a = std::abs(order);
    double kk = 0.0;  // k^{order} K_{|order|}(k)
    if (k < 1e-30) {
        // Small-argument limit; avoids inf·0 at the quadrature's extreme nodes.
        kk = a == 0.0 ? -std::log(0.5 * k) - 0.5772156649015329
                      : std::tgamma(a) * std::pow(2.0, a - 1.0) * std::pow(k, order - a);
    } else {
        kk = std::pow(k, order) * std::cyl_bessel_k(a, k);
    }
    return std::pow(2.0 * kPi, 0.5 * n) * std::pow(2.0, 1.0 - mu) / std::tgamma(mu) * kk;
}

// ∫_0^∞ f on a half line with integrable endpoint singularity at 0.
template <class F>
double half_line(F f) {
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate(f, 1e-13);
}

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

std::array<double, 3> normalized(std::array<double, 3> v) {
    const double len = std::sqrt(dot3(v, v));
    for (double& x : v) {
        x /= len;
    }
    return v;
}

// Orthonormal tangent frame at a unit vector y (only the first n−... components used).
std::array<std::array<double, 3>, 2> tangent_frame(int n, const std::array<double, 3>& y) {
    if (n == 1) {
        return {{{-y[1], y[0], 0.0}, {0.0, 0.0, 0.0}}};
    }
    std::array<double, 3> a = std::abs(y[2]) < 0.9 ? std::array<double, 3>{0.0, 0.0, 1.0}
                                                   : std::array<double, 3>{1.0, 0.0, 0.0};
    const double d = dot3(a, y);
    for (int i = 0; i < 3; ++i) {
        a[i] -= d * y[i];
    }
    a = normalized(a);
    const std::array<double, 3> b{y[1] * a[2] - y[2] * a[1], y[2] * a[0] - y[0] * a[2],
                                  y[0] * a[1] - y[1] * a[0]};
    return {a, b};
}

double sphere_profile(const ModelConstants& c, const std::array<double, 3>& x,
                      const std::array<double, 3>& x0, double eps) {
    const double nu = nu_of(c);
    const double denom = (1.0 + eps * eps) - (1.0 - eps * eps) * dot3(x, x0);
    return std::pow(c.lambda0, nu / (2.0 * c.gamma)) * std::pow(2.0 * eps / denom, nu);
}

// Minimal periodic displacement a − b per axis.
FlatPoint periodic_offset(const Geometry& torus, const Point& a, const Point& b) {
    FlatPoint d{0.0, 0.0};
    const double p = torus.period();
    for (int i = 0; i < torus.dimension(); ++i) {
        double diff = std::fmod(a[i] - b[i], p);
        if (diff > 0.5 * p) {
            diff -= p;
        } else if (diff < -0.5 * p) {
            diff += p;
        }
        d[i] = diff;
    }
    return d;
}

double torus_profile(const ModelConstants& c, const Geometry& torus, const Point& x,
                     const Point& x0, double eps) {
    const FlatPoint d = periodic_offset(torus, x, x0);
    const double r = std::hypot(d[0], d[1]);
    BubbleParams p;
    p.center = {0.0, 0.0};
    p.eps = eps;
    p.amp = 1.0;
    return bubble_flat(d, p, c) * cutoff(r, 0.25 * torus.period());
}

}  // namespace

ModelConstants model_constants(int n, double gamma) {
    if ((n != 1 && n != 2) || !(gamma > 0.0 && gamma < 1.0) || !(n > 2.0 * gamma)) {
        throw DimensionError("model constants need n in {1,2}, 0 < gamma < 1, n > 2 gamma");
    }
    ModelConstants c;
    c.n = n;
    c.gamma = gamma;
    c.lambda0 = fraclap::sphere_eigenvalue(n, gamma, 0);
    c.sphere_volume = unit_sphere_area(n);
    const double nu = 0.5 * (n - 2.0 * gamma);
    c.alpha = std::pow(2.0, nu) * std::pow(c.lambda0, nu / (2.0 * gamma));
    c.alpha_bar = c.alpha;
    c.green_const = std::pow(kPi, -0.5 * n) * std::pow(2.0, -2.0 * gamma) *
                    std::exp(special::log_gamma(0.5 * n - gamma) - special::log_gamma(gamma));
    c.Y_sphere = c.lambda0 * std::pow(c.sphere_volume, 2.0 * gamma / n);
    return c;
}

double bubble_flat(const FlatPoint& x, const BubbleParams& params, const ModelConstants& c) {
    const double nu = nu_of(c);
    double r2 = 0.0;
    for (int i = 0; i < c.n; ++i) {
        const double d = (x[i] - params.center[i]) / params.eps;
        r2 += d * d;
    }
    return params.amp * std::pow(params.eps, -nu) * c.alpha_bar * std::pow(1.0 + r2, -nu);
}

double bubble_volume_quadrature(const ModelConstants& c) {
    const double crit = 2.0 * c.n / (c.n - 2.0 * c.gamma);
    const double peak = std::pow(c.alpha_bar, crit);
    const double radial =
        half_line([&](double r) { return std::pow(r, c.n - 1) * std::pow(1.0 + r * r, -c.n); });
    return peak * radial_area(c.n) * radial;
}

double bubble_volume(const ModelConstants& c) {
    return std::pow(c.lambda0, c.n / (2.0 * c.gamma)) * c.sphere_volume;
}

double bubble_pde_residual(const ModelConstants& c, double r_max, int samples) {
    const int n = c.n;
    const double nu = nu_of(c);
    const double conf = (n + 2.0 * c.gamma) / (n - 2.0 * c.gamma);
    const double two_gamma = 2.0 * c.gamma;
    auto symbol_ft = [&](double k) {
        if (k < 1e-100) {
            return 0.0;  // integrable O(1) behaviour on a negligible interval
        }
        return std::pow(k, two_gamma) * c.alpha_bar * ft_power(n, nu, k);
    };
    boost::math::quadrature::tanh_sinh<double> near;
    double worst = 0.0;
    const double rhs_peak = std::pow(c.alpha_bar, conf);
    for (int i = 0; i < samples; ++i) {
        const double r = r_max * i / std::max(samples - 1, 1);
        std::function<double(double)> integrand;
        if (n == 1) {
            integrand = [&](double k) { return symbol_ft(k) * std::cos(k * r) / kPi; };
        } else {
            integrand = [&](double k) {
                return symbol_ft(k) * std::cyl_bessel_j(0.0, k * r) * k / (2.0 * kPi);
            };
        }
        const double lhs =
            near.integrate(integrand, 0.0, 1.0) +
            boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 1.0, 60.0,
                                                                          15, 1e-13);
        const double rhs = rhs_peak * std::pow(1.0 + r * r, -nu * conf);
        worst = std::max(worst, std::abs(lhs - rhs) / rhs_peak);
    }
    return worst;
}

FlatPoint stereo_project(int n, const std::array<double, 3>& y) {
    const double top = y[n];
    if (std::abs(1.0 - top) < 1e-14) {
        throw PoleError("stereographic projection is undefined at the north pole");
    }
    FlatPoint xi{0.0, 0.0};
    for (int i = 0; i < n; ++i) {
        xi[i] = y[i] / (1.0 - top);
    }
    return xi;
}

std::array<double, 3> stereo_lift(int n, const FlatPoint& xi) {
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) {
        r2 += xi[i] * xi[i];
    }
    std::array<double, 3> y{0.0, 0.0, 0.0};
    for (int i = 0; i < n; ++i) {
        y[i] = 2.0 * xi[i] / (1.0 + r2);
    }
    y[n] = (r2 - 1.0) / (r2 + 1.0);
    return y;
}

double stereo_rho(int n, double gamma, const FlatPoint& xi) {
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) {
        r2 += xi[i] * xi[i];
    }
    return std::pow(2.0 / (1.0 + r2), 0.5 * (n - 2.0 * gamma));
}

std::vector<double> sphere_to_plane(const SpectralField& v, const std::vector<FlatPoint>& xi) {
    const Geometry& g = v.geometry();
    if (g.kind() != GeometryKind::Sphere) {
        throw GeometryMismatch("stereographic transfer needs a sphere field");
    }
    std::vector<double> out;
    out.reserve(xi.size());
    for (const auto& p : xi) {
        const Point x = g.from_embedding(stereo_lift(g.dimension(), p));
        out.push_back(stereo_rho(g.dimension(), g.gamma(), p) * g.evaluate(v.coeffs(), x));
    }
    return out;
}

std::vector<double> plane_to_sphere(const Geometry& sphere,
                                    const std::function<double(const FlatPoint&)>& w_hat,
                                    const std::vector<Point>& points) {
    if (sphere.kind() != GeometryKind::Sphere) {
        throw GeometryMismatch("stereographic transfer needs a sphere");
    }
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& x : points) {
        const FlatPoint xi = stereo_project(sphere.dimension(), sphere.embed(x));
        out.push_back(w_hat(xi) / stereo_rho(sphere.dimension(), sphere.gamma(), xi));
    }
    return out;
}

double flat_quadratic_form_low_modes(const ModelConstants& c, double a, double b, double c1) {
    const int n = c.n;
    const double nu = nu_of(c);
    const double scale = std::pow(2.0, nu);
    auto integrand = [&](double k) {
        if (k < 1e-100) {
            return 0.0;  // the integrand is O(k^{n−2γ−1}); this tail is below roundoff
        }
        const double f0 = ft_power(n, nu, k);
        const double f1 = ft_power(n, nu + 1.0, k);
        const double even = scale * ((a + b) * f0 - 2.0 * b * f1);
        // ξ₁(1+|ξ|²)^{−ν−1} transforms to −i k₁ F_ν / (2ν); k₁² averages to k²/n.
        const double odd_sq = std::pow(2.0 * scale * c1 / (2.0 * nu), 2) * k * k * f0 * f0 / n;
        return std::pow(k, 2.0 * c.gamma + n - 1.0) * (even * even + odd_sq);
    };
    return radial_area(n) * half_line(integrand) / std::pow(2.0 * kPi, n);
}

SpectralField sphere_bubble(const GeometryPtr& sphere, const Point& center, double eps,
                            double amp) {
    if (sphere->kind() != GeometryKind::Sphere) {
        throw GeometryMismatch("sphere_bubble needs a sphere");
    }
    if (!(eps > 0.0)) {
        throw RangeError("bubble scale must be positive");
    }
    const auto c = model_constants(sphere->dimension(), sphere->gamma());
    const auto x0 = sphere->embed(center);
    const Grid& grid = sphere->grid(Geometry::Level::Fine);
    Eigen::VectorXd values(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        values[static_cast<Eigen::Index>(i)] =
            amp * sphere_profile(c, sphere->embed(grid.nodes[i]), x0, eps);
    }
    return project_fine(sphere, values);
}

double cutoff(double r, double r0) {
    const double inner = 0.5 * r0;
    if (r <= inner) {
        return 1.0;
    }
    if (r >= r0) {
        return 0.0;
    }
    const double t = (r - inner) / (r0 - inner);
    return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

SpectralField torus_bubble(const GeometryPtr& torus, const Point& center, double eps,
                           double amp) {
    if (torus->kind() != GeometryKind::Torus) {
        throw GeometryMismatch("torus_bubble needs a torus");
    }
    if (!(eps > 0.0)) {
        throw RangeError("bubble scale must be positive");
    }
    const auto c = model_constants(torus->dimension(), torus->gamma());
    const Grid& grid = torus->grid(Geometry::Level::Fine);
    Eigen::VectorXd values(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        values[static_cast<Eigen::Index>(i)] =
            amp * torus_profile(c, *torus, grid.nodes[i], center, eps);
    }
    return project_fine(torus, values);
}

BubbleFit fit_bubble(const SpectralField& u, const ModelConstants& c) {
    const Geometry& geom = u.geometry();
    const int n = geom.dimension();
    const bool sphere = geom.kind() == GeometryKind::Sphere;
    const Grid& grid = geom.grid();
    const Eigen::VectorXd& vals = u.grid_values();
    const Eigen::Index m = vals.size();
    const Eigen::VectorXd sw = grid.weights.cwiseSqrt();

    Eigen::Index peak_at = 0;
    const double peak = vals.maxCoeff(&peak_at);
    const double nu = nu_of(c);
    const double peak_const = sphere ? c.alpha_bar / std::pow(2.0, nu) : c.alpha_bar;

    // Parameters: [tangent offsets (n), log ε, log amp, background].
    Point center = grid.nodes[static_cast<std::size_t>(peak_at)];
    std::array<double, 3> y0 = geom.embed(center);
    double log_eps = std::log(std::pow(peak_const / peak, 1.0 / nu));
    double log_amp = 0.0;
    double background = 0.0;

    auto model_at = [&](const std::array<double, 3>& y, const Point& x0, double le, double la,
                        double bg, std::size_t i) {
        const double eps = std::exp(le);
        const double bubble =
            sphere ? sphere_profile(c, geom.embed(grid.nodes[i]), y, eps)
                   : torus_profile(c, geom, grid.nodes[i], x0, eps);
        return bg + std::exp(la) * bubble;
    };
    auto shifted = [&](const Eigen::VectorXd& d, std::array<double, 3>& y, Point& x0) {
        if (sphere) {
            const auto frame = tangent_frame(n, y0);
            y = y0;
            for (int j = 0; j < n; ++j) {
                for (int k = 0; k < 3; ++k) {
                    y[k] += d[j] * frame[j][k];
                }
            }
            y = normalized(y);
            x0 = geom.from_embedding(y);
        } else {
            x0 = center;
            for (int j = 0; j < n; ++j) {
                x0[j] += d[j];
            }
            y = {x0[0], x0[1], 0.0};
        }
    };
    const int np = n + 3;
    auto residual = [&](const Eigen::VectorXd& d) {
        std::array<double, 3> y{};
        Point x0{};
        shifted(d, y, x0);
        Eigen::VectorXd r(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            r[i] = sw[i] * (model_at(y, x0, log_eps + d[n], log_amp + d[n + 1],
                                     background + d[n + 2], static_cast<std::size_t>(i)) -
                            vals[i]);
        }
        return r;
    };

    BubbleFit fit;
    double mu = 1e-3;
    Eigen::VectorXd r = residual(Eigen::VectorXd::Zero(np));
    double cost = r.squaredNorm();
    for (int it = 0; it < 50; ++it) {
        fit.iterations = it + 1;
        Eigen::MatrixXd J(m, np);
        for (int j = 0; j < np; ++j) {
            Eigen::VectorXd d = Eigen::VectorXd::Zero(np);
            const double h = 1e-6;
            d[j] = h;
            const Eigen::VectorXd rp = residual(d);
            d[j] = -h;
            J.col(j) = (rp - residual(d)) / (2.0 * h);
        }
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        bool improved = false;
        for (int tries = 0; tries < 12 && !improved; ++tries) {
            Eigen::MatrixXd A = JtJ;
            A.diagonal() += mu * JtJ.diagonal().cwiseMax(1e-12);
            const Eigen::VectorXd d = A.ldlt().solve(-g);
            const Eigen::VectorXd rn = residual(d);
            const double cn = rn.squaredNorm();
            if (cn < cost) {
                std::array<double, 3> y{};
                Point x0{};
                shifted(d, y, x0);
                y0 = y;
                center = x0;
                log_eps += d[n];
                log_amp += d[n + 1];
                background += d[n + 2];
                const double rel = (cost - cn) / std::max(cost, 1e-300);
                r = rn;
                cost = cn;
                mu = std::max(mu / 3.0, 1e-9);
                improved = true;
                if (rel < 1e-12) {
                    it = 50;
                }
            } else {
                mu *= 4.0;
            }
        }
        if (!improved) {
            break;
        }
    }

    fit.center = sphere ? geom.from_embedding(y0) : center;
    fit.eps = std::exp(log_eps);
    fit.amp = std::exp(log_amp);
    fit.background = background;
    double resid = 0.0;
    double mass = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
        const double full = model_at(y0, center, log_eps, log_amp, background,
                                     static_cast<std::size_t>(i));
        resid += grid.weights[i] * std::abs(full - vals[i]);
        mass += grid.weights[i] * (full - background);
    }
    fit.residual_fraction = resid / mass;
    if (!(fit.residual_fraction <= 0.5)) {
        throw FitError("bubble fit residual exceeds half of the bubble mass");
    }
    return fit;
}

Concentration detect_concentration(const SpectralField& final_u, const ModelConstants& c) {
    const Geometry& geom = final_u.geometry();
    const double power = c.n / (2.0 * c.gamma);
    Concentration out;
    out.E_total = energy_E(final_u);
    out.E_background = out.E_total;
    const Eigen::VectorXd fine = final_u.fine_values();
    const double mx = fine.maxCoeff();
    const double mn = fine.minCoeff();
    const bool concentrated =
        !(mn > 0.0) || std::pow(mn / mx, 1.0 / (2.0 * nu_of(c))) <= kConcentrationScale;
    if (concentrated) {
        const BubbleFit fit = fit_bubble(final_u, c);
        const GeometryPtr& g = final_u.geometry_ptr();
        const SpectralField bubble = geom.kind() == GeometryKind::Sphere
                                         ? sphere_bubble(g, fit.center, fit.eps, fit.amp)
                                         : torus_bubble(g, fit.center, fit.eps, fit.amp);
        const SpectralField rest = final_u - bubble;
        const double vol_rest = volume(rest);
        const double vol_all = volume(final_u);
        out.E_background = vol_rest < 1e-6 * vol_all ? 0.0 : energy_E(rest);
        const double nu = nu_of(c);
        const double peak_const =
            geom.kind() == GeometryKind::Sphere ? c.alpha_bar / std::pow(2.0, nu) : c.alpha_bar;
        out.eps_est = std::pow(fit.amp * peak_const / mx, 1.0 / nu);
        out.center_est = fit.center;
    }
    out.L_est = (std::pow(out.E_total, power) - std::pow(out.E_background, power)) /
                std::pow(c.Y_sphere, power);
    out.near_integer = std::abs(out.L_est - std::round(out.L_est)) < 0.1;
    return out;
}

Concentration detect_concentration(const DiagnosticsSeries& series, const ModelConstants& c) {
    if (!series.final_u) {
        throw FitError("series carries no final field");
    }
    return detect_concentration(*series.final_u, c);
}

double threshold_s0(double Y_M_est, const ModelConstants& c) {
    const double power = c.n / (2.0 * c.gamma);
    const double ym = std::max(Y_M_est, 0.0);
    return std::pow(std::pow(ym, power) + std::pow(c.Y_sphere, power), 1.0 / power);
}

bool aubin_holds(double Y_M_est, const ModelConstants& c) {
    return Y_M_est <= c.Y_sphere + 1e-8;
}

}  // namespace fracflow
