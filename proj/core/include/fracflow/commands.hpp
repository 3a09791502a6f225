#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fracflow/config.hpp"
#include "fracflow/flow.hpp"

namespace fracflow {

struct CommandOptions {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;  // overrides the config seed
    bool quiet = false;
};

struct VerifyCheck {
    std::string name;
    bool pass = false;
    double value = 0.0;      // worst observed quantity
    double tolerance = 0.0;  // bound it is compared against
};

/// Tolerances loosen below truncation 8.
struct VerifyTolerances {
    double transform = 1e-10;
    double self_adjoint = 1e-10;
    double stroock = 1e-10;
    double calibration = 1e-4;
};
VerifyTolerances verify_tolerances(int truncation);

/// The invariant battery behind `fracflow verify`.
std::vector<VerifyCheck> verify_battery(const RunConfig& config, std::uint64_t seed);

/// Runs the configured flow; exposes the series for in-process callers.
DiagnosticsSeries run_configured_flow(const RunConfig& config);

int cmd_flow(const RunConfig& config, const CommandOptions& opt, std::ostream& log);
int cmd_spectrum(const RunConfig& config, const CommandOptions& opt, std::ostream& log);
int cmd_verify(const RunConfig& config, const CommandOptions& opt, std::ostream& log);
int cmd_bubble(const RunConfig& config, const CommandOptions& opt, std::ostream& log);
int cmd_sweep(const RunConfig& config, const CommandOptions& opt, std::ostream& log);

}  // namespace fracflow
