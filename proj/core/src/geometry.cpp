#include "fracflow/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fracflow/errors.hpp"
#include "fracflow/fraclap.hpp"
#include "fracflow/special.hpp"

namespace fracflow {

namespace {

constexpr double kPi = std::numbers::pi;

void check_dimension(int n, double gamma) {
    if (n != 1 && n != 2) {
        throw DimensionError("dimension n must be 1 or 2, got " + std::to_string(n));
    }
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw DimensionError("gamma must lie in (0, 1), got " + std::to_string(gamma));
    }
    if (!(n > 2.0 * gamma)) {
        throw DimensionError("require n > 2*gamma (n = " + std::to_string(n) +
                             ", gamma = " + std::to_string(gamma) + ")");
    }
}

// 1D real trigonometric basis value, orthonormal on [0, period).
// Index 0: constant; 2k-1: cos k; 2k: sin k.
double trig_basis(int index, double x, double period) {
    if (index == 0) {
        return 1.0 / std::sqrt(period);
    }
    const int k = (index + 1) / 2;
    const double arg = 2.0 * kPi * k * x / period;
    const double scale = std::sqrt(2.0 / period);
    return (index % 2 == 1) ? scale * std::cos(arg) : scale * std::sin(arg);
}

// Signed wave number of a 1D trig index: cos k -> k, sin k -> -k.
int trig_signed_wave(int index) {
    if (index == 0) {
        return 0;
    }
    const int k = (index + 1) / 2;
    return (index % 2 == 1) ? k : -k;
}

int trig_index_of(int signed_wave) {
    if (signed_wave == 0) {
        return 0;
    }
    return signed_wave > 0 ? 2 * signed_wave - 1 : -2 * signed_wave;
}

int sphere_coeff_index(int l, int m) { return l * l + l + m; }

}  // namespace

Geometry::Geometry(TorusTag, int n, double period, int modes_per_axis, double gamma)
    : kind_(GeometryKind::Torus), n_(n), gamma_(gamma), period_(period) {
    check_dimension(n, gamma);
    if (modes_per_axis < 4) {
        throw ResolutionError("modes_per_axis must be >= 4, got " + std::to_string(modes_per_axis));
    }
    if (!(period > 0.0)) {
        throw DimensionError("torus period must be positive");
    }
    truncation_ = (modes_per_axis - 1) / 2;
    volume_ = std::pow(period, n);

    const int n1 = 2 * truncation_ + 1;
    const double scale = 2.0 * kPi / period;
    if (n == 1) {
        for (int i = 0; i < n1; ++i) {
            const int k = trig_signed_wave(i);
            modes_.push_back({{k, 0}, scale * scale * k * k, std::abs(k)});
        }
    } else {
        for (int i1 = 0; i1 < n1; ++i1) {
            for (int i2 = 0; i2 < n1; ++i2) {
                const int k1 = trig_signed_wave(i1);
                const int k2 = trig_signed_wave(i2);
                modes_.push_back({{k1, k2},
                                  scale * scale * (k1 * k1 + k2 * k2),
                                  std::max(std::abs(k1), std::abs(k2))});
            }
        }
    }
    build_trig_level(standard_, modes_per_axis, false);
    build_trig_level(fine_, 2 * modes_per_axis, false);

    symbol_.resize(static_cast<Eigen::Index>(modes_.size()));
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        symbol_[static_cast<Eigen::Index>(i)] = fraclap::symbol_value(*this, modes_[i]);
    }
}

Geometry::Geometry(SphereTag, int n, int degree_max, double gamma)
    : kind_(GeometryKind::Sphere), n_(n), gamma_(gamma), period_(2.0 * kPi) {
    check_dimension(n, gamma);
    if (degree_max < 4) {
        throw ResolutionError("degree_max must be >= 4, got " + std::to_string(degree_max));
    }
    truncation_ = degree_max;
    if (n == 1) {
        volume_ = 2.0 * kPi;
        const int n1 = 2 * degree_max + 1;
        for (int i = 0; i < n1; ++i) {
            const int k = trig_signed_wave(i);
            const int l = std::abs(k);
            modes_.push_back({{l, k}, static_cast<double>(l * l), l});
        }
        // Half-cell shift keeps the stereographic pole θ = π/2 off the grid.
        build_trig_level(standard_, 2 * degree_max + 2, true);
        build_trig_level(fine_, 4 * degree_max + 4, true);
    } else {
        volume_ = 4.0 * kPi;
        for (int l = 0; l <= degree_max; ++l) {
            for (int m = -l; m <= l; ++m) {
                modes_.push_back({{l, m}, static_cast<double>(l * (l + 1)), l});
            }
        }
        build_sphere_level(standard_, degree_max + 1, 2 * degree_max + 2);
        build_sphere_level(fine_, 2 * degree_max + 2, 4 * degree_max + 4);
    }
    symbol_.resize(static_cast<Eigen::Index>(modes_.size()));
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        symbol_[static_cast<Eigen::Index>(i)] = fraclap::symbol_value(*this, modes_[i]);
    }
}

void Geometry::build_trig_level(LevelData& lv, int m, bool shifted) const {
    const int n1 = 2 * truncation_ + 1;
    lv.nodes_per_axis = m;
    std::vector<double> x(m);
    for (int j = 0; j < m; ++j) {
        x[j] = period_ * (j + (shifted ? 0.5 : 0.0)) / m;
    }
    lv.trig.resize(m, n1);
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < n1; ++i) {
            lv.trig(j, i) = trig_basis(i, x[j], period_);
        }
    }
    const double h = period_ / m;
    if (n_ == 1) {
        lv.grid.shape = {m, 1};
        lv.grid.weights = Eigen::VectorXd::Constant(m, h);
        for (int j = 0; j < m; ++j) {
            lv.grid.nodes.push_back({x[j], 0.0});
        }
    } else {
        lv.grid.shape = {m, m};
        lv.grid.weights = Eigen::VectorXd::Constant(m * m, h * h);
        for (int j1 = 0; j1 < m; ++j1) {
            for (int j2 = 0; j2 < m; ++j2) {
                lv.grid.nodes.push_back({x[j1], x[j2]});
            }
        }
    }
}

void Geometry::build_sphere_level(LevelData& lv, int nlat, int nlon) const {
    const int lmax = truncation_;
    lv.nlat = nlat;
    lv.nlon = nlon;
    lv.grid.shape = {nlat, nlon};
    const auto rule = special::gauss_legendre(nlat);
    const int table = special::legendre_table_size(lmax);
    lv.legendre.resize(static_cast<std::size_t>(table) * nlat);
    lv.grid.weights.resize(nlat * nlon);
    std::vector<double> buf;
    // Colatitude ascending: θ_j = arccos(x) with x descending.
    for (int j = 0; j < nlat; ++j) {
        const double xj = rule.nodes[nlat - 1 - j];
        const double wj = rule.weights[nlat - 1 - j];
        const double theta = std::acos(xj);
        special::normalized_legendre(lmax, xj, buf);
        std::copy(buf.begin(), buf.end(), lv.legendre.begin() + static_cast<std::ptrdiff_t>(j) * table);
        for (int i = 0; i < nlon; ++i) {
            const double phi = 2.0 * kPi * i / nlon;
            lv.grid.nodes.push_back({theta, phi});
            lv.grid.weights[j * nlon + i] = wj * 2.0 * kPi / nlon;
        }
    }
    lv.cos_table.resize(nlon, lmax + 1);
    lv.sin_table.resize(nlon, lmax + 1);
    for (int i = 0; i < nlon; ++i) {
        const double phi = 2.0 * kPi * i / nlon;
        for (int m = 0; m <= lmax; ++m) {
            lv.cos_table(i, m) = std::cos(m * phi);
            lv.sin_table(i, m) = std::sin(m * phi);
        }
    }
}

Eigen::VectorXd Geometry::trig_synthesis(const LevelData& lv, const Eigen::VectorXd& c) const {
    if (n_ == 1) {
        return lv.trig * c;
    }
    const int n1 = 2 * truncation_ + 1;
    const int m = lv.nodes_per_axis;
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMat> cm(c.data(), n1, n1);
    Eigen::VectorXd out(m * m);
    Eigen::Map<RowMat> vm(out.data(), m, m);
    vm.noalias() = lv.trig * cm * lv.trig.transpose();
    return out;
}

Eigen::VectorXd Geometry::trig_analysis(const LevelData& lv, const Eigen::VectorXd& v) const {
    const int m = lv.nodes_per_axis;
    const double h = period_ / m;
    if (n_ == 1) {
        return h * (lv.trig.transpose() * v);
    }
    const int n1 = 2 * truncation_ + 1;
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    Eigen::Map<const RowMat> vm(v.data(), m, m);
    Eigen::VectorXd out(n1 * n1);
    Eigen::Map<RowMat> cm(out.data(), n1, n1);
    cm.noalias() = (h * h) * (lv.trig.transpose() * vm * lv.trig);
    return out;
}

Eigen::VectorXd Geometry::sphere_synthesis(const LevelData& lv, const Eigen::VectorXd& c) const {
    const int lmax = truncation_;
    const int table = special::legendre_table_size(lmax);
    Eigen::VectorXd out(lv.nlat * lv.nlon);
    Eigen::VectorXd a(lmax + 1);
    Eigen::VectorXd b(lmax + 1);
    for (int j = 0; j < lv.nlat; ++j) {
        const double* leg = lv.legendre.data() + static_cast<std::ptrdiff_t>(j) * table;
        for (int m = 0; m <= lmax; ++m) {
            double am = 0.0;
            double bm = 0.0;
            for (int l = m; l <= lmax; ++l) {
                const double p = leg[special::legendre_index(lmax, l, m)];
                am += c[sphere_coeff_index(l, m)] * p;
                if (m > 0) {
                    bm += c[sphere_coeff_index(l, -m)] * p;
                }
            }
            const double s = (m > 0) ? std::numbers::sqrt2 : 1.0;
            a[m] = s * am;
            b[m] = s * bm;
        }
        out.segment(j * lv.nlon, lv.nlon).noalias() = lv.cos_table * a + lv.sin_table * b;
    }
    return out;
}

Eigen::VectorXd Geometry::sphere_analysis(const LevelData& lv, const Eigen::VectorXd& v) const {
    const int lmax = truncation_;
    const int table = special::legendre_table_size(lmax);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(modes_.size()));
    for (int j = 0; j < lv.nlat; ++j) {
        const double* leg = lv.legendre.data() + static_cast<std::ptrdiff_t>(j) * table;
        const auto row = v.segment(j * lv.nlon, lv.nlon);
        const double w = lv.grid.weights[j * lv.nlon];
        const Eigen::VectorXd a = w * (lv.cos_table.transpose() * row);
        const Eigen::VectorXd b = w * (lv.sin_table.transpose() * row);
        for (int m = 0; m <= lmax; ++m) {
            const double s = (m > 0) ? std::numbers::sqrt2 : 1.0;
            for (int l = m; l <= lmax; ++l) {
                const double p = s * leg[special::legendre_index(lmax, l, m)];
                c[sphere_coeff_index(l, m)] += p * a[m];
                if (m > 0) {
                    c[sphere_coeff_index(l, -m)] += p * b[m];
                }
            }
        }
    }
    return c;
}

Eigen::VectorXd Geometry::to_grid(const Eigen::VectorXd& coeffs, Level l) const {
    if (coeffs.size() != static_cast<Eigen::Index>(modes_.size())) {
        throw GeometryMismatch("coefficient vector length does not match basis size");
    }
    const auto& lv = level(l);
    if (kind_ == GeometryKind::Sphere && n_ == 2) {
        return sphere_synthesis(lv, coeffs);
    }
    return trig_synthesis(lv, coeffs);
}

Eigen::VectorXd Geometry::to_coeffs(const Eigen::VectorXd& values, Level l) const {
    const auto& lv = level(l);
    if (values.size() != static_cast<Eigen::Index>(lv.grid.size())) {
        throw GeometryMismatch("grid value vector length does not match grid size");
    }
    if (kind_ == GeometryKind::Sphere && n_ == 2) {
        return sphere_analysis(lv, values);
    }
    return trig_analysis(lv, values);
}

Eigen::VectorXd Geometry::basis_at(const Point& x) const {
    const auto count = static_cast<Eigen::Index>(modes_.size());
    Eigen::VectorXd out(count);
    if (kind_ == GeometryKind::Sphere && n_ == 2) {
        std::vector<double> leg;
        special::normalized_legendre(truncation_, std::cos(x[0]), leg);
        for (int l = 0; l <= truncation_; ++l) {
            for (int m = -l; m <= l; ++m) {
                const int am = std::abs(m);
                const double p = leg[special::legendre_index(truncation_, l, am)];
                double v = p;
                if (m > 0) {
                    v = std::numbers::sqrt2 * p * std::cos(am * x[1]);
                } else if (m < 0) {
                    v = std::numbers::sqrt2 * p * std::sin(am * x[1]);
                }
                out[sphere_coeff_index(l, m)] = v;
            }
        }
        return out;
    }
    const int n1 = 2 * truncation_ + 1;
    if (n_ == 1) {
        for (int i = 0; i < n1; ++i) {
            out[i] = trig_basis(i, x[0], period_);
        }
        return out;
    }
    for (int i1 = 0; i1 < n1; ++i1) {
        const double b1 = trig_basis(i1, x[0], period_);
        for (int i2 = 0; i2 < n1; ++i2) {
            out[i1 * n1 + i2] = b1 * trig_basis(i2, x[1], period_);
        }
    }
    return out;
}

double Geometry::evaluate(const Eigen::VectorXd& coeffs, const Point& x) const {
    return basis_at(x).dot(coeffs);
}

int Geometry::find_mode(std::array<int, 2> index) const {
    if (kind_ == GeometryKind::Sphere && n_ == 2) {
        const int l = index[0];
        const int m = index[1];
        if (l < 0 || l > truncation_ || std::abs(m) > l) {
            return -1;
        }
        return sphere_coeff_index(l, m);
    }
    if (kind_ == GeometryKind::Sphere) {
        // S¹: (l, ±l)
        if (index[0] < 0 || index[0] > truncation_ || std::abs(index[1]) != index[0]) {
            return -1;
        }
        return trig_index_of(index[1]);
    }
    const int n1 = 2 * truncation_ + 1;
    if (std::abs(index[0]) > truncation_ || std::abs(index[1]) > truncation_) {
        return -1;
    }
    if (n_ == 1) {
        return index[1] == 0 ? trig_index_of(index[0]) : -1;
    }
    return trig_index_of(index[0]) * n1 + trig_index_of(index[1]);
}

std::array<double, 3> Geometry::embed(const Point& x) const {
    if (kind_ != GeometryKind::Sphere) {
        return {x[0], x[1], 0.0};
    }
    if (n_ == 1) {
        return {std::cos(x[0]), std::sin(x[0]), 0.0};
    }
    const double st = std::sin(x[0]);
    return {st * std::cos(x[1]), st * std::sin(x[1]), std::cos(x[0])};
}

Point Geometry::from_embedding(const std::array<double, 3>& y) const {
    if (kind_ != GeometryKind::Sphere) {
        return {y[0], y[1]};
    }
    if (n_ == 1) {
        double theta = std::atan2(y[1], y[0]);
        if (theta < 0.0) {
            theta += 2.0 * kPi;
        }
        return {theta, 0.0};
    }
    const double z = std::clamp(y[2], -1.0, 1.0);
    double phi = std::atan2(y[1], y[0]);
    if (phi < 0.0) {
        phi += 2.0 * kPi;
    }
    return {std::acos(z), phi};
}

double Geometry::distance(const Point& a, const Point& b) const {
    if (kind_ == GeometryKind::Sphere) {
        const auto ea = embed(a);
        const auto eb = embed(b);
        const double dot = ea[0] * eb[0] + ea[1] * eb[1] + ea[2] * eb[2];
        return std::acos(std::clamp(dot, -1.0, 1.0));
    }
    double sum = 0.0;
    for (int d = 0; d < n_; ++d) {
        double diff = std::fmod(std::abs(a[d] - b[d]), period_);
        diff = std::min(diff, period_ - diff);
        sum += diff * diff;
    }
    return std::sqrt(sum);
}

GeometryPtr make_torus(int n, double period, int modes_per_axis, double gamma) {
    return std::make_shared<const Geometry>(Geometry::TorusTag{}, n, period, modes_per_axis, gamma);
}

GeometryPtr make_sphere(int n, int degree_max, double gamma) {
    return std::make_shared<const Geometry>(Geometry::SphereTag{}, n, degree_max, gamma);
}

// ---------------------------------------------------------------------------

SpectralField::SpectralField(GeometryPtr geometry, Eigen::VectorXd coeffs)
    : geometry_(std::move(geometry)), coeffs_(std::move(coeffs)) {
    grid_values_ = geometry_->to_grid(coeffs_);
}

SpectralField SpectralField::from_grid(GeometryPtr geometry, const Eigen::VectorXd& grid_values) {
    Eigen::VectorXd c = geometry->to_coeffs(grid_values);
    return SpectralField(std::move(geometry), std::move(c));
}

SpectralField SpectralField::constant(GeometryPtr geometry, double value) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(geometry->basis_size()));
    c[0] = value * std::sqrt(geometry->background_volume());
    return SpectralField(std::move(geometry), std::move(c));
}

Eigen::VectorXd SpectralField::fine_values() const {
    return geometry_->to_grid(coeffs_, Geometry::Level::Fine);
}

SpectralField SpectralField::operator+(const SpectralField& other) const {
    require_same_geometry(*this, other);
    return SpectralField(geometry_, coeffs_ + other.coeffs_);
}

SpectralField SpectralField::operator-(const SpectralField& other) const {
    require_same_geometry(*this, other);
    return SpectralField(geometry_, coeffs_ - other.coeffs_);
}

SpectralField SpectralField::operator*(double scale) const {
    return SpectralField(geometry_, scale * coeffs_);
}

void require_same_geometry(const SpectralField& a, const SpectralField& b) {
    if (a.geometry_ptr().get() != b.geometry_ptr().get()) {
        throw GeometryMismatch("fields belong to different geometries");
    }
}

void require_geometry(const Geometry& g, const SpectralField& f) {
    if (&g != f.geometry_ptr().get()) {
        throw GeometryMismatch("field does not belong to this geometry");
    }
}

double integrate(const Geometry& geom, const SpectralField& f) {
    require_geometry(geom, f);
    return geom.grid().weights.dot(f.grid_values());
}

double inner(const SpectralField& f, const SpectralField& g) {
    require_same_geometry(f, g);
    return f.coeffs().dot(g.coeffs());
}

Eigen::VectorXd fine_values(const Geometry& geom, const Eigen::VectorXd& coeffs) {
    return geom.to_grid(coeffs, Geometry::Level::Fine);
}

SpectralField project_fine(const GeometryPtr& geom, const Eigen::VectorXd& values) {
    return SpectralField(geom, geom->to_coeffs(values, Geometry::Level::Fine));
}

double integrate_fine(const Geometry& geom, const Eigen::VectorXd& values) {
    return geom.grid(Geometry::Level::Fine).weights.dot(values);
}

}  // namespace fracflow
