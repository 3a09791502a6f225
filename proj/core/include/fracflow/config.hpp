#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fracflow/geometry.hpp"

namespace fracflow {

// INI grammar (one `key = value` per line, `;` or `#` comments, [section] headers):
//
//   seed = 42
//   [geometry]   kind = torus|sphere, n, gamma, truncation, period (torus only)
//   [initial]    type = constant|cosine|harmonic|bubble|file
//                value, amplitude, wavevector = "k1 k2", degree, order,
//                eps, center = "x y", background, path
//   [integrator] dt0, t_end, tol, tol_conv, dt_max, adaptive
//   [output]     csv, report, stride
//   [spectrum]   count, weighted, u_inf (path of grid values)
//   [sweep]      gammas = "g1 g2 ..."
//
// Only [geometry] kind/n/gamma/truncation are mandatory.

struct GeometrySpec {
    GeometryKind kind = GeometryKind::Torus;
    int n = 1;
    double gamma = 0.0;
    int truncation = 0;
    double period = 0.0;  // defaults to 2π
};

struct InitialSpec {
    std::string type = "constant";
    double value = 1.0;
    double amplitude = 0.0;
    std::array<int, 2> wavevector{1, 0};
    int degree = 1;
    int order = 0;
    double eps = 0.5;
    Point center{0.0, 0.0};
    double background = 0.0;
    std::string path;
};

struct IntegratorSpec {
    double dt0 = 1e-3;
    double t_end = 1.0;
    double tol = 1e-4;
    double tol_conv = 1e-8;
    double dt_max = 1e-3;
    bool adaptive = true;
};

struct OutputSpec {
    std::string csv = "diagnostics.csv";
    std::string report = "summary.txt";
    int stride = 1;
};

struct SpectrumSpec {
    int count = 20;
    bool weighted = false;
    std::string u_inf;
};

struct RunConfig {
    GeometrySpec geometry;
    InitialSpec initial;
    IntegratorSpec integrator;
    OutputSpec output;
    SpectrumSpec spectrum;
    std::vector<double> sweep_gammas;
    std::uint64_t seed = 0;
    std::string base_dir;  // directory of the config file; relative paths resolve against it
};

/// Parse and validate. ConfigError names the offending key.
RunConfig parse_config(std::istream& in, const std::string& base_dir = "");
RunConfig load_config(const std::string& path);

GeometryPtr build_geometry(const GeometrySpec& spec);
/// Initial conformal factor described by the [initial] section.
SpectralField build_initial(const GeometryPtr& geom, const RunConfig& config);

/// One value per line; blank lines and `#` comments skipped.
std::vector<double> read_values(const std::string& path);

}  // namespace fracflow
