#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace fracflow {

enum class GeometryKind { Torus, Sphere };

/// A point on a model geometry.
///  - torus: Cartesian coordinates (x, y); y unused when n = 1
///  - S¹:    (θ, 0) with θ the arc-length angle
///  - S²:    (θ, φ) colatitude and longitude
using Point = std::array<double, 2>;

/// Quadrature grid: nodes, positive weights, and the tensor shape used by the transforms.
struct Grid {
    std::vector<Point> nodes;
    Eigen::VectorXd weights;
    std::array<int, 2> shape{0, 1};  // (outer, inner) node counts; node index = outer * inner_count + inner

    std::size_t size() const { return nodes.size(); }
};

/// Metadata of one real basis function.
struct BasisMode {
    /// Torus: nonnegative wave numbers per axis. Sphere: (degree l, signed order m);
    /// negative m selects the sine partner. For S¹ the pair is (|k|, ±|k|).
    std::array<int, 2> index{0, 0};
    /// Torus: physical |k|² = (2π/period)² (k₁² + k₂²). Sphere: l(l + n − 1).
    double laplace_eigenvalue = 0.0;
    /// Torus: max(k₁, k₂). Sphere: degree l.
    int degree = 0;
};

class Geometry;
using GeometryPtr = std::shared_ptr<const Geometry>;

/// Immutable description of a model background: flat torus or round sphere, with an
/// orthonormal real spectral basis (w.r.t. dμ₀), a standard quadrature grid that
/// integrates products of two basis functions exactly, and a 2× oversampled grid for
/// pointwise nonlinear operations.
class Geometry {
public:
    enum class Level { Standard, Fine };

    GeometryKind kind() const { return kind_; }
    int dimension() const { return n_; }
    double gamma() const { return gamma_; }
    /// Max wave number per axis (torus) or max harmonic degree (sphere).
    int truncation() const { return truncation_; }
    /// Torus period; 2π on spheres.
    double period() const { return period_; }
    double background_volume() const { return volume_; }

    std::size_t basis_size() const { return modes_.size(); }
    const std::vector<BasisMode>& modes() const { return modes_; }

    /// Symbol of the conformal fractional Laplacian on each basis function.
    const Eigen::VectorXd& symbol() const { return symbol_; }

    const Grid& grid(Level level = Level::Standard) const {
        return level == Level::Standard ? standard_.grid : fine_.grid;
    }

    Eigen::VectorXd to_grid(const Eigen::VectorXd& coeffs, Level level = Level::Standard) const;
    /// Quadrature projection onto the basis. Exact inverse of to_grid on band-limited data.
    Eigen::VectorXd to_coeffs(const Eigen::VectorXd& values, Level level = Level::Standard) const;

    /// Values of all basis functions at an arbitrary point.
    Eigen::VectorXd basis_at(const Point& x) const;
    double evaluate(const Eigen::VectorXd& coeffs, const Point& x) const;

    /// Index of the basis function with the given mode index, or -1.
    int find_mode(std::array<int, 2> index) const;

    /// Embedding of a sphere point in ℝ^{n+1}; third entry unused for S¹.
    std::array<double, 3> embed(const Point& x) const;
    /// Inverse of embed for unit vectors.
    Point from_embedding(const std::array<double, 3>& y) const;
    /// Geodesic (sphere) or periodic Euclidean (torus) distance.
    double distance(const Point& a, const Point& b) const;

    struct TorusTag {};
    struct SphereTag {};
    Geometry(TorusTag, int n, double period, int modes_per_axis, double gamma);
    Geometry(SphereTag, int n, int degree_max, double gamma);

private:
    struct LevelData {
        Grid grid;
        int nodes_per_axis = 0;        // torus and S¹
        Eigen::MatrixXd trig;          // nodes_per_axis × (2K+1), torus and S¹
        // S² only
        int nlat = 0;
        int nlon = 0;
        std::vector<double> legendre;  // [j * table + legendre_index(l, m)]
        Eigen::MatrixXd cos_table;     // nlon × (L+1)
        Eigen::MatrixXd sin_table;
    };

    void build_trig_level(LevelData& level, int nodes_per_axis, bool shifted) const;
    void build_sphere_level(LevelData& level, int nlat, int nlon) const;
    Eigen::VectorXd trig_synthesis(const LevelData& level, const Eigen::VectorXd& coeffs) const;
    Eigen::VectorXd trig_analysis(const LevelData& level, const Eigen::VectorXd& values) const;
    Eigen::VectorXd sphere_synthesis(const LevelData& level, const Eigen::VectorXd& coeffs) const;
    Eigen::VectorXd sphere_analysis(const LevelData& level, const Eigen::VectorXd& values) const;
    const LevelData& level(Level l) const { return l == Level::Standard ? standard_ : fine_; }

    GeometryKind kind_;
    int n_;
    double gamma_;
    int truncation_;
    double period_;
    double volume_;
    std::vector<BasisMode> modes_;
    Eigen::VectorXd symbol_;
    LevelData standard_;
    LevelData fine_;
};

/// Flat torus [0, period)^n with modes_per_axis uniform nodes per axis.
/// Errors: DimensionError unless n ∈ {1, 2} and n > 2γ; ResolutionError if modes_per_axis < 4.
GeometryPtr make_torus(int n, double period, int modes_per_axis, double gamma);

/// Round unit sphere Sⁿ truncated at harmonic degree degree_max.
/// Errors: DimensionError as for the torus; ResolutionError if degree_max < 4.
GeometryPtr make_sphere(int n, int degree_max, double gamma);

/// A real scalar field on a geometry: basis coefficients plus cached standard-grid values.
class SpectralField {
public:
    SpectralField(GeometryPtr geometry, Eigen::VectorXd coeffs);

    static SpectralField from_grid(GeometryPtr geometry, const Eigen::VectorXd& grid_values);
    static SpectralField constant(GeometryPtr geometry, double value);
    static SpectralField zero(GeometryPtr geometry) { return constant(std::move(geometry), 0.0); }

    const Geometry& geometry() const { return *geometry_; }
    const GeometryPtr& geometry_ptr() const { return geometry_; }
    const Eigen::VectorXd& coeffs() const { return coeffs_; }
    const Eigen::VectorXd& grid_values() const { return grid_values_; }
    Eigen::VectorXd fine_values() const;

    SpectralField operator+(const SpectralField& other) const;
    SpectralField operator-(const SpectralField& other) const;
    SpectralField operator*(double scale) const;

private:
    GeometryPtr geometry_;
    Eigen::VectorXd coeffs_;
    Eigen::VectorXd grid_values_;
};

inline SpectralField operator*(double scale, const SpectralField& f) { return f * scale; }

/// Throws GeometryMismatch unless both fields live on the same geometry instance.
void require_same_geometry(const SpectralField& a, const SpectralField& b);
void require_geometry(const Geometry& g, const SpectralField& f);

/// Quadrature sum Σ wᵢ f(xᵢ) on the standard grid.
double integrate(const Geometry& geom, const SpectralField& f);

/// ∫ f g dμ₀ computed in coefficient space (Parseval).
double inner(const SpectralField& f, const SpectralField& g);

/// Pointwise-on-fine-grid helpers used by all nonlinear functionals.
Eigen::VectorXd fine_values(const Geometry& geom, const Eigen::VectorXd& coeffs);
SpectralField project_fine(const GeometryPtr& geom, const Eigen::VectorXd& fine_values);
double integrate_fine(const Geometry& geom, const Eigen::VectorXd& fine_values);

}  // namespace fracflow
