#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fracflow/geometry.hpp"

namespace fracflow::fraclap {

/// Eigenvalue of P_γ on degree-k spherical harmonics of Sⁿ:
/// Γ(k + n/2 + γ) / Γ(k + n/2 − γ), evaluated through log-Gamma differences.
double sphere_eigenvalue(int n, double gamma, int k);

/// Symbol of P_γ on one basis function of `geom`. Torus: |k|^{2γ} (physical wave number).
double symbol_value(const Geometry& geom, const BasisMode& mode);

/// Multiplier on mode index k: harmonic degree on spheres, integer wave number |k| on
/// the torus (one axis). Throws ModeOutOfRange for k < 0 or k > truncation.
double multiplier(const Geometry& geom, int k);

/// Per-basis-function multipliers, same ordering as the coefficient vector.
inline const Eigen::VectorXd& multiplier_table(const Geometry& geom) { return geom.symbol(); }

/// P_γ^{g₀} f: diagonal action in coefficient space.
SpectralField apply_P(const SpectralField& f);

/// ∫ f P(f) dμ₀ = Σ λ_k c_k².
double quadratic_form(const SpectralField& f);

/// ∫ P(v) w dμ₀ by quadrature on the standard grid.
double pairing(const SpectralField& v, const SpectralField& w);

/// Solution of the per-mode extension problem
///   (ρ^{1−2γ} W')' = κ² ρ^{1−2γ} W,  W(0) = 1,  W decaying,
/// on a graded radial mesh.
struct ExtensionProfile {
    double wavenumber = 0.0;     // κ = |k| in physical units
    double gamma = 0.0;
    double weight_exponent = 0;  // a = 1 − 2γ
    std::vector<double> rho;     // rho[0] = 0
    std::vector<double> values;  // W(rho)
    double flux = 0.0;           // −lim_{ρ→0} ρ^{1−2γ} ∂_ρ W
    double residual = 0.0;       // relative residual of the discrete system
};

/// Graded mesh: rho[0] = 0, rho[1] = 1e−6·rho_max, cell widths growing geometrically
/// so that `nodes` nodes reach rho_max exactly.
std::vector<double> graded_mesh(double rho_max, int nodes);

/// Finite-volume solve of the extension ODE on a caller-supplied mesh (first entry 0).
/// Errors: SingularMeshError if mesh[1] > 1e−6·mesh.back() or the mesh is not increasing;
/// DecayError if W has not decayed below 1e−8 at the outer end.
ExtensionProfile solve_extension(double wavenumber, double gamma, const std::vector<double>& mesh);

/// Raw Dirichlet-to-Neumann flux of torus mode k (integer wave number), rho_max·κ ≥ 20.
double extension_dtn(const Geometry& torus, int k, double rho_max, int nodes);

struct Calibration {
    double c_gamma = 0.0;
    std::vector<double> ratios;  // |k|^{2γ} / F(k), k = 1..max_mode
    double max_relative_spread = 0.0;
};

/// Recover c_γ = |k|^{2γ}/F(k) from k = 1 and certify constancy for k = 2..max_mode.
/// Throws CalibrationError if the ratios disagree by more than `tolerance` (relative).
Calibration calibrate_cgamma(const Geometry& torus, int max_mode = 8, double tolerance = 1e-4);

/// Default radial resolution used by calibrate_cgamma.
inline constexpr int kDefaultExtensionNodes = 4000;

}  // namespace fracflow::fraclap
