#pragma once

#include <cmath>
#include <functional>
#include <numbers>

#include "fracflow/geometry.hpp"

namespace fftest {

inline constexpr double pi = std::numbers::pi;

// Field sampled from a closed-form function on the standard grid.
inline fracflow::SpectralField sampled(const fracflow::GeometryPtr& g,
                                       const std::function<double(const fracflow::Point&)>& f) {
    const auto& grid = g->grid();
    Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = f(grid.nodes[i]);
    }
    return fracflow::SpectralField::from_grid(g, v);
}

// Same, but on the fine grid and projected (for fields that are not band-limited).
inline fracflow::SpectralField sampled_fine(const fracflow::GeometryPtr& g,
                                            const std::function<double(const fracflow::Point&)>& f) {
    const auto& grid = g->grid(fracflow::Geometry::Level::Fine);
    Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = f(grid.nodes[i]);
    }
    return fracflow::project_fine(g, v);
}

inline fracflow::SpectralField cosine_torus(const fracflow::GeometryPtr& g, double amp) {
    return sampled(g, [amp](const fracflow::Point& x) { return 1.0 + amp * std::cos(x[0]); });
}

// 1 + amp·Y₁⁰ with Y₁⁰ = √(3/4π) cos θ.
inline fracflow::SpectralField y10_sphere(const fracflow::GeometryPtr& g, double amp) {
    const double c = std::sqrt(3.0 / (4.0 * pi));
    return sampled(g, [amp, c](const fracflow::Point& x) { return 1.0 + amp * c * std::cos(x[0]); });
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace fftest
