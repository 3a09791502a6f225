#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "fracflow/flow.hpp"

namespace fracflow {

/// Column order of the diagnostics CSV.
inline constexpr const char* kCsvHeader =
    "t,s,E,vol,F2,Fp,minR,maxR,minU,maxU,dt_used,step_accepted";

/// Writes "# seed=<seed>", the header and every `stride`-th row (the last row is always
/// kept) in %.17g with LF line endings.
void write_csv(std::ostream& out, const DiagnosticsSeries& series, std::uint64_t seed,
               int stride = 1);

struct ParsedCsv {
    std::uint64_t seed = 0;
    std::vector<DiagnosticsRow> rows;
};

/// Inverse of write_csv; throws ConfigError on malformed input.
ParsedCsv read_csv(std::istream& in);

using ReportEntries = std::vector<std::pair<std::string, std::string>>;

/// `key: value` lines.
void write_report(std::ostream& out, const ReportEntries& entries);

/// %.17g formatting.
std::string format_double(double x);

}  // namespace fracflow
