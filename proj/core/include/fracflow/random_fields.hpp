#pragma once

#include "fracflow/geometry.hpp"
#include "fracflow/rng.hpp"

namespace fracflow {

/// Band-limited field with normal coefficients damped by (1 + degree)^{−decay}.
SpectralField random_field(const GeometryPtr& geom, CounterRng& rng, double decay = 1.0);

/// 1 + perturbation scaled so its fine-grid sup equals `spread` (< 1 keeps it positive).
SpectralField random_positive_field(const GeometryPtr& geom, CounterRng& rng,
                                    double spread = 0.5, double decay = 1.5);

}  // namespace fracflow
