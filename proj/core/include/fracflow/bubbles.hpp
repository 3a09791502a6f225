#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "fracflow/flow.hpp"
#include "fracflow/geometry.hpp"

namespace fracflow {

/// Closed-form constants of the standard bubble and the round sphere.
struct ModelConstants {
    int n = 0;
    double gamma = 0.0;
    double lambda0 = 0.0;       // Γ(n/2+γ)/Γ(n/2−γ)
    double sphere_volume = 0.0;  // 2π or 4π
    double alpha = 0.0;          // 2^{(n−2γ)/2} λ0^{(n−2γ)/(4γ)}
    double alpha_bar = 0.0;      // peak of ū; equals alpha under R ≡ 1 normalization
    double green_const = 0.0;    // π^{−n/2} 2^{−2γ} Γ(n/2−γ)/Γ(γ)
    double Y_sphere = 0.0;       // λ0 · vol(Sⁿ)^{2γ/n}
};

ModelConstants model_constants(int n, double gamma);

/// A point of ℝⁿ (second entry ignored for n = 1).
using FlatPoint = std::array<double, 2>;

struct BubbleParams {
    FlatPoint center{0.0, 0.0};
    double eps = 1.0;
    double amp = 1.0;
};

/// amp · ε^{−(n−2γ)/2} ᾱ (1 + |x−x₀|²/ε²)^{−(n−2γ)/2}.
double bubble_flat(const FlatPoint& x, const BubbleParams& params, const ModelConstants& c);

/// ∫_{ℝⁿ} ū^{2n/(n−2γ)} dx by radial quadrature.
double bubble_volume_quadrature(const ModelConstants& c);
/// Closed form λ0^{n/(2γ)} vol(Sⁿ) = Y_sphere^{n/(2γ)}.
double bubble_volume(const ModelConstants& c);

/// Max relative residual of (−Δ)^γ ū − ū^{(n+2γ)/(n−2γ)} at `samples` radii in [0, r_max],
/// with (−Δ)^γ ū evaluated through the exact Fourier transform of (1+|x|²)^{−ν}.
double bubble_pde_residual(const ModelConstants& c, double r_max = 10.0, int samples = 41);

// Stereographic projection from the north pole e_{n+1}.

/// ξ_i = y_i / (1 − y_{n+1}); PoleError at the pole.
FlatPoint stereo_project(int n, const std::array<double, 3>& y);
/// Inverse projection to the unit sphere in ℝ^{n+1}.
std::array<double, 3> stereo_lift(int n, const FlatPoint& xi);
/// ρ(ξ) = (2/(1+|ξ|²))^{(n−2γ)/2}.
double stereo_rho(int n, double gamma, const FlatPoint& xi);

/// ŵ(ξ) = ρ(ξ) v(Σ⁻¹ξ) for a field on the sphere.
std::vector<double> sphere_to_plane(const SpectralField& v, const std::vector<FlatPoint>& xi);
/// v(x) = ŵ(Σx)/ρ(Σx) at sphere points; PoleError if a point is the pole.
std::vector<double> plane_to_sphere(const Geometry& sphere,
                                    const std::function<double(const FlatPoint&)>& w_hat,
                                    const std::vector<Point>& points);

/// ∫ ŵ (−Δ)^γ ŵ dξ for ŵ the transfer of v = a + b·x_{n+1} + c·x₁, via exact transforms.
double flat_quadratic_form_low_modes(const ModelConstants& c, double a, double b, double c1);

/// Sphere bubble centered at x₀ with scale ε: the conformal image of the R ≡ 1 constant,
///   amp · λ0^{(n−2γ)/(4γ)} [2ε / ((1+ε²) − (1−ε²)⟨x, x₀⟩)]^{(n−2γ)/2}.
SpectralField sphere_bubble(const GeometryPtr& sphere, const Point& center, double eps,
                            double amp = 1.0);

/// C² radial cutoff: 1 on [0, r0/2], 0 beyond r0, quintic smoothstep in between.
double cutoff(double r, double r0);

/// Flat bubble times cutoff (r0 = quarter period) on the torus, periodic distance.
SpectralField torus_bubble(const GeometryPtr& torus, const Point& center, double eps,
                           double amp = 1.0);

struct BubbleFit {
    Point center{0.0, 0.0};
    double eps = 0.0;
    double amp = 0.0;
    double background = 0.0;
    double residual_fraction = 0.0;  // ∫|u − model| / ∫ bubble
    int iterations = 0;
};

/// Gauss–Newton fit of background + bubble seeded at the grid maximum (50 iterations max).
/// FitError if the residual exceeds half of the bubble mass.
BubbleFit fit_bubble(const SpectralField& u, const ModelConstants& c);

struct Concentration {
    double L_est = 0.0;
    bool near_integer = false;
    std::optional<double> eps_est;
    std::optional<Point> center_est;
    double E_total = 0.0;
    double E_background = 0.0;
};

/// A bubble of scale ε has max/min = ε^{−(n−2γ)}. Fits are attempted only when the implied
/// scale (min u / max u)^{1/(n−2γ)} is at most this, or when u is not positive.
inline constexpr double kConcentrationScale = 0.25;

/// L_est = (E(u)^{n/2γ} − E_bg^{n/2γ}) / Y_sphere^{n/2γ} with E_bg the energy of u minus the
/// fitted bubble.
Concentration detect_concentration(const SpectralField& final_u, const ModelConstants& c);
Concentration detect_concentration(const DiagnosticsSeries& series, const ModelConstants& c);

/// [Y_M^{n/2γ} + Y_sphere^{n/2γ}]^{2γ/n}.
double threshold_s0(double Y_M_est, const ModelConstants& c);

/// Y_M_est ≤ Y_sphere + 1e−8.
bool aubin_holds(double Y_M_est, const ModelConstants& c);

}  // namespace fracflow
