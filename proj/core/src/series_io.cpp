#include "fracflow/series_io.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "fracflow/errors.hpp"

namespace fracflow {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_csv(std::ostream& out, const DiagnosticsSeries& series, std::uint64_t seed,
               int stride) {
    out << "# seed=" << seed << '\n' << kCsvHeader << '\n';
    const std::size_t total = series.rows.size();
    const auto step = static_cast<std::size_t>(std::max(stride, 1));
    for (std::size_t i = 0; i < total; ++i) {
        if (i % step != 0 && i + 1 != total) {
            continue;
        }
        const auto& r = series.rows[i];
        const double cols[] = {r.t,    r.s,    r.E,    r.vol,  r.F2,   r.Fp,
                               r.minR, r.maxR, r.minU, r.maxU, r.dt_used};
        for (double v : cols) {
            out << format_double(v) << ',';
        }
        out << r.step_accepted << '\n';
    }
}

ParsedCsv read_csv(std::istream& in) {
    ParsedCsv parsed;
    std::string line;
    if (!std::getline(in, line) || line.rfind("# seed=", 0) != 0) {
        throw ConfigError("csv", "missing '# seed=' line");
    }
    parsed.seed = std::stoull(line.substr(7));
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw ConfigError("csv", "unexpected header '" + line + "'");
    }
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<double> v;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            const std::size_t comma = std::min(line.find(',', pos), line.size());
            double x = 0.0;
            const auto res = std::from_chars(line.data() + pos, line.data() + comma, x);
            if (res.ec != std::errc() || res.ptr != line.data() + comma) {
                throw ConfigError("csv", "bad number in row '" + line + "'");
            }
            v.push_back(x);
            pos = comma + 1;
        }
        if (v.size() != 12) {
            throw ConfigError("csv", "expected 12 columns in '" + line + "'");
        }
        DiagnosticsRow r;
        r.t = v[0];
        r.s = v[1];
        r.E = v[2];
        r.vol = v[3];
        r.F2 = v[4];
        r.Fp = v[5];
        r.minR = v[6];
        r.maxR = v[7];
        r.minU = v[8];
        r.maxU = v[9];
        r.dt_used = v[10];
        r.step_accepted = static_cast<int>(v[11]);
        parsed.rows.push_back(r);
    }
    return parsed;
}

void write_report(std::ostream& out, const ReportEntries& entries) {
    for (const auto& [k, v] : entries) {
        out << k << ": " << v << '\n';
    }
}

}  // namespace fracflow
