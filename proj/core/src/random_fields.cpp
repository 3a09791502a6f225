#include "fracflow/random_fields.hpp"

#include <cmath>

namespace fracflow {

SpectralField random_field(const GeometryPtr& geom, CounterRng& rng, double decay) {
    const auto& modes = geom->modes();
    Eigen::VectorXd c(static_cast<Eigen::Index>(modes.size()));
    for (std::size_t i = 0; i < modes.size(); ++i) {
        c[static_cast<Eigen::Index>(i)] = rng.normal() * std::pow(1.0 + modes[i].degree, -decay);
    }
    return SpectralField(geom, c);
}

SpectralField random_positive_field(const GeometryPtr& geom, CounterRng& rng, double spread,
                                    double decay) {
    SpectralField p = random_field(geom, rng, decay);
    const double sup = p.fine_values().cwiseAbs().maxCoeff();
    return SpectralField::constant(geom, 1.0) + p * (spread / sup);
}

}  // namespace fracflow
