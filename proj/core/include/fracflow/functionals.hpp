#pragma once

#include <vector>
#include <map>

#include <Eigen/Dense>

#include "fracflow/geometry.hpp"

namespace fracflow {

/// Exponents that recur throughout: all depend only on (n, γ).
struct Exponents {
    double n;
    double gamma;
    double critical;   // 2n/(n−2γ): volume density power
    double conformal;  // (n+2γ)/(n−2γ): curvature power
    double beta;       // 4γ/(n−2γ): weight power
    double sobolev;    // (n−2γ)/n: exponent of the volume in E

    static Exponents of(const Geometry& geom);
    /// 2n/(n+2γ), the dual exponent used by F_p in the convergence diagnostics.
    double dual() const { return 2.0 * n / (n + 2.0 * gamma); }
};

/// Fine-grid sample of everything derived from one conformal factor u.
struct CurvatureSample {
    Eigen::VectorXd u;        // u on the fine grid
    Eigen::VectorXd Pu;       // P_γ^{g₀} u on the fine grid
    Eigen::VectorXd R;        // u^{−(n+2γ)/(n−2γ)} P u
    Eigen::VectorXd measure;  // quadrature weights × u^{2n/(n−2γ)} (dμ)
    double quadratic = 0.0;   // ∫ u P u dμ₀
    double volume = 0.0;      // ∫ dμ
    double s = 0.0;           // μ-average of R
    double min_u = 0.0;
    double max_u = 0.0;
};

/// Positivity floor for conformal factors.
inline constexpr double kPositivityFloor = 1e-10;

/// Throws PositivityError (with fine-grid location) when min u ≤ floor.
CurvatureSample sample_curvature(const SpectralField& u, double floor = kPositivityFloor);

/// R = u^{−(n+2γ)/(n−2γ)} P_γ^{g₀} u, evaluated on the oversampled grid and projected.
SpectralField curvature_R(const SpectralField& u);

/// s = ∫ u P u dμ₀ / ∫ u^{2n/(n−2γ)} dμ₀.
double mean_curvature_s(const SpectralField& u);

/// ∫ u^{2n/(n−2γ)} dμ₀.
double volume(const SpectralField& u);

/// Yamabe quotient E(u). Uses |u| in the volume term; ZeroFieldError for u ≡ 0.
double energy_E(const SpectralField& u);

/// L²(dμ₀) gradient of E: 2[P u − s u^{2n/(n−2γ)−1}] / vol^{(n−2γ)/n}.
SpectralField energy_gradient(const SpectralField& u);

struct Moments {
    double S = 0.0;               // ∫ R^q dμ  (|R|^q when R changes sign)
    double F = 0.0;               // ∫ |R − s|^q dμ
    bool used_absolute = false;   // true when R < 0 somewhere and q is non-integer
};

Moments moments_SqFq(const SpectralField& u, double q);
Moments moments_SqFq(const CurvatureSample& sample, double q);

/// Scalar summary of one conformal factor.
struct FunctionalReport {
    double volume = 0.0;
    double s = 0.0;
    double E = 0.0;
    std::map<double, double> Sq;
    std::map<double, double> Fq;
    double minR = 0.0;
    double maxR = 0.0;
    double minU = 0.0;
    double maxU = 0.0;
    double sup_R_minus_s = 0.0;
};

/// Report with S_q, F_q for q ∈ {1, 2, 2n/(n+2γ)} plus any extra exponents (all ≥ 1).
FunctionalReport report(const SpectralField& u, const std::vector<double>& extra_q = {});
FunctionalReport report(const CurvatureSample& sample, const Exponents& ex,
                        const std::vector<double>& extra_q = {});

/// ∫ f^{p−1} P f dμ₀ − (4(p−1)/p²) ∫ f^{p/2} P(f^{p/2}) dμ₀ on the background metric.
/// Requires f > 0 and p ∈ (1, 4].
double stroock_varopoulos_slack(const SpectralField& f, double p);

/// ∫ P^g(v) w dμ for g = u^{4/(n−2γ)} g₀, computed as ∫ P₀(u v) u w dμ₀.
double conformal_pairing(const SpectralField& u, const SpectralField& v, const SpectralField& w);

/// Hölder comparison F_2^{1/2} vol^{1/p−1/2} − F_p^{1/p} with p = 2n/(n+2γ); nonnegative.
double holder_slack(const SpectralField& u);

/// Elementary two-point inequalities used to bound remainder terms.
///   kind 1 (p > 0): |a^p − b^p| ≤ C|a−b|^p + C a^{p−1}|a−b|
///   kind 2 (p > 1): |a^p − b^p − p a^{p−1}(a−b)| ≤ C a^{max(p−2,0)}|a−b|^{min(p,2)} + C|a−b|^p
///   kind 3 (p > 2): |... + p(p−1)/2 b^{p−2}(a−b)²| ≤ C a^{max(p−3,0)}|a−b|^{min(p,3)} + C|a−b|^p
namespace pointwise {

/// Frozen constant for (kind, p), p ∈ {1.2, 2, 2.5, 3.5}. Obtained by brute-force
/// maximization over (a, b) ∈ (0, 10]² with a factor-2 margin.
double constant(int kind, double p);

/// C·rhs − lhs; nonnegative when the inequality holds.
double slack(int kind, double p, double a, double b, double C);

}  // namespace pointwise

}  // namespace fracflow
