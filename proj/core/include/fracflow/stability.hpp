#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "fracflow/flow.hpp"
#include "fracflow/geometry.hpp"

namespace fracflow {

/// P ψ = λ W ψ with W = u_∞^{4γ/(n−2γ)}; ψ normalized by ∫ ψ² W dμ₀ = 1.
struct EigenPair {
    double lambda;
    SpectralField psi;
};

struct WeightedSpectrum {
    std::vector<EigenPair> pairs;  // ascending λ
    Eigen::MatrixXd mass;          // Galerkin matrix of W in the spectral basis
    Eigen::VectorXd weight_fine;   // W on the fine grid
};

/// Galerkin matrix M_ij = ∫ W φ_i φ_j dμ₀ by fine-grid quadrature.
Eigen::MatrixXd weight_mass_matrix(const Geometry& geom, const Eigen::VectorXd& weight_fine);

/// `count` smallest eigenpairs of the pencil (diag(symbol), M). count ≤ 0 means all.
WeightedSpectrum weighted_eigs(const SpectralField& u_inf, int count);

/// Relative residual ‖Kψ − λMψ‖ / (λ‖ψ‖) in coefficient space.
double eigen_residual(const EigenPair& pair, const Eigen::MatrixXd& mass);

struct LowModeSet {
    std::vector<int> indices;  // into WeightedSpectrum::pairs
    double threshold = 0.0;    // (n+2γ)/(n−2γ) s_∞
};

/// A = {a : λ_a ≤ threshold}, ties within 1e−10 relative counted in A.
/// DegenerateError if the first complementary eigenvalue is within 1e−8 of the threshold;
/// IndexError if every computed eigenvalue falls in A (no margin).
LowModeSet low_mode_set(const WeightedSpectrum& spectrum, const Geometry& geom, double s_inf);

/// The non-canonical projection f − Σ_{a∈A} (∫ψ_a f dμ₀) ψ_a W.
SpectralField projection_Pi(const SpectralField& f, const WeightedSpectrum& spectrum,
                            const LowModeSet& A);
/// The W-orthogonal projection f − Σ_{a∈A} (∫ψ_a f W dμ₀) ψ_a.
SpectralField projection_Pi_canonical(const SpectralField& f, const WeightedSpectrum& spectrum,
                                      const LowModeSet& A);

/// [(n+2γ)/(n−2γ) s_∞ ∫ W w² dμ₀] / ∫ w P w dμ₀.
double coercivity_ratio(const SpectralField& w, const WeightedSpectrum& spectrum,
                        const LowModeSet& A);

/// c_est = 1 − max ratio over probes: `probe_count` seeded random fields projected onto the
/// complement of A, plus the computed complementary eigenfunctions when include_eigenprobes.
double coercivity_gap(const WeightedSpectrum& spectrum, const LowModeSet& A,
                      const SpectralField& u_inf, int probe_count, std::uint64_t seed,
                      bool include_eigenprobes = true);

/// Γ(2+n/2+γ)/Γ(2+n/2−γ) − α^{4γ/(n−2γ)} (n+2γ)/(n−2γ) 2^{−2γ}. RangeError off the
/// admissible set.
double sphere_gap_margin(int n, double gamma);

/// ‖u‖‖v‖ − ∫ u P v dμ₀ with ‖u‖² = Σ λ_a (∫ u ψ_a W)²; needs the full spectrum.
double cauchy_schwarz_slack(const SpectralField& u, const SpectralField& v,
                            const WeightedSpectrum& spectrum);

struct LojasiewiczFit {
    double delta = 0.0;
    double slope = 0.0;
    std::size_t rows_used = 0;
    bool in_band = false;  // δ ∈ (−0.5, 1.5)
};

/// Slope of log(s − s_∞) against log F_{2n/(n+2γ)} over the tail half of the series.
/// InsufficientDataError with fewer than 20 usable rows (s − s_∞ ≥ 1e−13).
LojasiewiczFit lojasiewicz_fit(const DiagnosticsSeries& series, double s_inf);

}  // namespace fracflow
