#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "fracflow/errors.hpp"
#include "fracflow/functionals.hpp"
#include "fracflow/geometry.hpp"

namespace fracflow {

/// Snapshot of the flow: time, conformal factor, step size and diagnostics at t.
struct FlowState {
    double t = 0.0;
    SpectralField u;
    double dt = 0.0;
    FunctionalReport report;
};

/// One row per accepted step. Row 0 is the initial datum (dt_used = 0, step_accepted = 0).
struct DiagnosticsRow {
    double t = 0.0;
    double s = 0.0;
    double E = 0.0;
    double vol = 0.0;
    double F2 = 0.0;
    double Fp = 0.0;  // p = 2n/(n+2γ)
    double minR = 0.0;
    double maxR = 0.0;
    double minU = 0.0;
    double maxU = 0.0;
    double dt_used = 0.0;
    int step_accepted = 0;
};

enum class RunStatus { Completed, Converged };

struct DiagnosticsSeries {
    int n = 0;
    double gamma = 0.0;
    std::vector<DiagnosticsRow> rows;
    /// Extra moment exponents requested through FlowOptions::extra_q, and F_q per row.
    std::vector<double> extra_q;
    std::vector<std::vector<double>> extra_F;
    /// Relative volume drift of each accepted step before the rescale (index i ↔ rows[i+1]).
    std::vector<double> pre_rescale_drift;
    FunctionalReport initial;
    RunStatus status = RunStatus::Completed;
    std::size_t rejected_steps = 0;
    std::optional<SpectralField> final_u;
};

struct FlowOptions {
    double dt_max = 1e-3;
    double dt_min = 1e-14;
    double tol_conv = 1e-8;     // stop when sup|R − s| drops below this
    double s_slack = 1e-9;      // allowed increase of s across an accepted step
    double blowup = 1e8;        // BlowupError when max u exceeds this
    double positivity = 1e-10;  // floor relative to the initial min u
    int max_halvings = 20;
    bool adaptive = true;       // step doubling; false runs fixed steps of dt0
    std::vector<double> extra_q;
};

/// Errors raised by run() carry the partial series up to the failure.
template <class Base>
class RunError : public Base {
public:
    RunError(const std::string& what, std::shared_ptr<const DiagnosticsSeries> partial)
        : Base(what), partial_(std::move(partial)) {}
    const DiagnosticsSeries& partial() const { return *partial_; }

private:
    std::shared_ptr<const DiagnosticsSeries> partial_;
};
using RunStepFailure = RunError<StepFailure>;
using RunBlowup = RunError<BlowupError>;

/// Initial state with diagnostics.
FlowState make_state(const SpectralField& u0, double dt0);

/// One IMEX step of ∂_t u = (s − R)u followed by the volume rescale.
/// `target_volume` defaults to the current volume. `drift` receives the relative
/// volume error before rescaling. Throws PositivityError, BlowupError.
FlowState step(const FlowState& state, double dt, std::optional<double> target_volume = {},
               double* drift = nullptr, double positivity_floor = kPositivityFloor);

/// Adaptive run on [0, t_end]; terminates early (status Converged) once sup|R − s| < tol_conv.
/// `tol` is the local error target per unit time for step doubling.
DiagnosticsSeries run(const SpectralField& u0, double t_end, double dt0, double tol,
                      const FlowOptions& options = {});

/// minR(t) − exp(−4γ s₀ t/(n−2γ))·minR₀ per row.
std::vector<double> positivity_floor(const DiagnosticsSeries& series, double s0, double minR0);

/// (∫₀^T F_{q+1} dt by trapezoid, (n−2γ)/(2(n−2γq))·S_q(0)).
/// RangeError if q ≥ n/(2γ), q < 1, or the needed moments were not recorded.
std::pair<double, double> fq_integral_bound(const DiagnosticsSeries& series, double q);

}  // namespace fracflow
