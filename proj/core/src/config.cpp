#include "fracflow/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "fracflow/bubbles.hpp"
#include "fracflow/errors.hpp"

namespace fracflow {

namespace pt = boost::property_tree;

namespace {

template <class T>
T required(const pt::ptree& tree, const std::string& path, const std::string& key) {
    const auto node = tree.get_child_optional(path);
    if (!node) {
        throw ConfigError(key, "missing");
    }
    try {
        return node->get_value<T>();
    } catch (const pt::ptree_bad_data&) {
        throw ConfigError(key, "cannot parse '" + node->data() + "'");
    }
}

template <class T>
T optional_value(const pt::ptree& tree, const std::string& path, const std::string& key, T fallback) {
    const auto node = tree.get_child_optional(path);
    if (!node) {
        return fallback;
    }
    try {
        return node->get_value<T>();
    } catch (const pt::ptree_bad_data&) {
        throw ConfigError(key, "cannot parse '" + node->data() + "'");
    }
}

std::vector<double> number_list(const std::string& text, const std::string& key) {
    std::istringstream in(text);
    std::vector<double> out;
    std::string token;
    while (in >> token) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(token, &used));
            if (used != token.size()) {
                throw std::invalid_argument(token);
            }
        } catch (const std::exception&) {
            throw ConfigError(key, "cannot parse '" + token + "'");
        }
    }
    return out;
}

void require(bool ok, const std::string& key, const std::string& why) {
    if (!ok) {
        throw ConfigError(key, why);
    }
}

std::string resolve(const std::string& base, const std::string& path) {
    if (path.empty() || base.empty() || std::filesystem::path(path).is_absolute()) {
        return path;
    }
    return (std::filesystem::path(base) / path).string();
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::string& base_dir) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("<file>", e.message() + " at line " + std::to_string(e.line()));
    }
    RunConfig c;
    c.base_dir = base_dir;
    c.seed = optional_value<std::uint64_t>(tree, "seed", "seed", 0);

    const auto kind = required<std::string>(tree, "geometry.kind", "kind");
    require(kind == "torus" || kind == "sphere", "kind", "must be torus or sphere");
    c.geometry.kind = kind == "torus" ? GeometryKind::Torus : GeometryKind::Sphere;
    c.geometry.n = required<int>(tree, "geometry.n", "n");
    c.geometry.gamma = required<double>(tree, "geometry.gamma", "gamma");
    c.geometry.truncation = required<int>(tree, "geometry.truncation", "truncation");
    c.geometry.period =
        optional_value<double>(tree, "geometry.period", "period", 2.0 * std::numbers::pi);
    require(c.geometry.n == 1 || c.geometry.n == 2, "n", "must be 1 or 2");
    require(c.geometry.gamma > 0.0 && c.geometry.gamma < 1.0, "gamma", "must lie in (0, 1)");
    require(c.geometry.n > 2.0 * c.geometry.gamma, "gamma", "must satisfy n > 2 gamma");
    require(c.geometry.truncation >= 4, "truncation", "must be at least 4");
    require(c.geometry.period > 0.0, "period", "must be positive");

    auto& ini = c.initial;
    ini.type = optional_value<std::string>(tree, "initial.type", "type", "constant");
    require(ini.type == "constant" || ini.type == "cosine" || ini.type == "harmonic" ||
                ini.type == "bubble" || ini.type == "file",
            "type", "unknown initial data type '" + ini.type + "'");
    ini.value = optional_value<double>(tree, "initial.value", "value", 1.0);
    ini.amplitude = optional_value<double>(tree, "initial.amplitude", "amplitude", 0.0);
    const auto wv = number_list(
        optional_value<std::string>(tree, "initial.wavevector", "wavevector", "1 0"), "wavevector");
    require(!wv.empty() && wv.size() <= 2, "wavevector", "needs one or two integers");
    for (std::size_t i = 0; i < wv.size(); ++i) {
        require(wv[i] == std::round(wv[i]), "wavevector", "entries must be integers");
        ini.wavevector[i] = static_cast<int>(wv[i]);
    }
    ini.degree = optional_value<int>(tree, "initial.degree", "degree", 1);
    ini.order = optional_value<int>(tree, "initial.order", "order", 0);
    ini.eps = optional_value<double>(tree, "initial.eps", "eps", 0.5);
    require(ini.eps > 0.0, "eps", "must be positive");
    const auto ctr = number_list(
        optional_value<std::string>(tree, "initial.center", "center", "0 0"), "center");
    require(!ctr.empty() && ctr.size() <= 2, "center", "needs one or two coordinates");
    for (std::size_t i = 0; i < ctr.size(); ++i) {
        ini.center[i] = ctr[i];
    }
    ini.background = optional_value<double>(tree, "initial.background", "background", 0.0);
    ini.path = resolve(base_dir, optional_value<std::string>(tree, "initial.path", "path", ""));
    require(ini.type != "file" || !ini.path.empty(), "path", "required for file initial data");

    auto& in_spec = c.integrator;
    in_spec.dt0 = optional_value<double>(tree, "integrator.dt0", "dt0", 1e-3);
    in_spec.t_end = optional_value<double>(tree, "integrator.t_end", "t_end", 1.0);
    in_spec.tol = optional_value<double>(tree, "integrator.tol", "tol", 1e-4);
    in_spec.tol_conv = optional_value<double>(tree, "integrator.tol_conv", "tol_conv", 1e-8);
    in_spec.dt_max = optional_value<double>(tree, "integrator.dt_max", "dt_max", 1e-3);
    in_spec.adaptive = optional_value<bool>(tree, "integrator.adaptive", "adaptive", true);
    require(in_spec.dt0 > 0.0, "dt0", "must be positive");
    require(in_spec.t_end > 0.0, "t_end", "must be positive");
    require(in_spec.tol > 0.0, "tol", "must be positive");
    require(in_spec.tol_conv > 0.0, "tol_conv", "must be positive");
    require(in_spec.dt_max > 0.0, "dt_max", "must be positive");

    c.output.csv = optional_value<std::string>(tree, "output.csv", "csv", "diagnostics.csv");
    c.output.report = optional_value<std::string>(tree, "output.report", "report", "summary.txt");
    c.output.stride = optional_value<int>(tree, "output.stride", "stride", 1);
    require(c.output.stride >= 1, "stride", "must be at least 1");

    c.spectrum.count = optional_value<int>(tree, "spectrum.count", "count", 20);
    c.spectrum.weighted = optional_value<bool>(tree, "spectrum.weighted", "weighted", false);
    c.spectrum.u_inf =
        resolve(base_dir, optional_value<std::string>(tree, "spectrum.u_inf", "u_inf", ""));

    c.sweep_gammas =
        number_list(optional_value<std::string>(tree, "sweep.gammas", "gammas", ""), "gammas");
    for (double g : c.sweep_gammas) {
        require(g > 0.0 && g < 1.0 && c.geometry.n > 2.0 * g, "gammas",
                "every entry must satisfy 0 < gamma < 1 and n > 2 gamma");
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("<file>", "cannot open " + path);
    }
    return parse_config(in, std::filesystem::path(path).parent_path().string());
}

GeometryPtr build_geometry(const GeometrySpec& spec) {
    if (spec.kind == GeometryKind::Torus) {
        return make_torus(spec.n, spec.period, spec.truncation, spec.gamma);
    }
    return make_sphere(spec.n, spec.truncation, spec.gamma);
}

std::vector<double> read_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("path", "cannot open " + path);
    }
    std::vector<double> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') {
            continue;
        }
        try {
            out.push_back(std::stod(line.substr(start)));
        } catch (const std::exception&) {
            throw ConfigError("path", "bad value '" + line + "' in " + path);
        }
    }
    return out;
}

SpectralField build_initial(const GeometryPtr& geom, const RunConfig& config) {
    const auto& ini = config.initial;
    if (ini.type == "constant") {
        return SpectralField::constant(geom, ini.value);
    }
    if (ini.type == "cosine") {
        const Grid& grid = geom->grid();
        Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
        const double w = 2.0 * std::numbers::pi / geom->period();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto& x = grid.nodes[i];
            double phase = ini.wavevector[0] * w * x[0];
            if (geom->kind() == GeometryKind::Torus && geom->dimension() == 2) {
                phase += ini.wavevector[1] * w * x[1];
            }
            v[static_cast<Eigen::Index>(i)] = ini.value + ini.amplitude * std::cos(phase);
        }
        return SpectralField::from_grid(geom, v);
    }
    if (ini.type == "harmonic") {
        const int idx = geom->find_mode({ini.degree, ini.order});
        if (idx < 0) {
            throw ConfigError("degree", "no basis function with this (degree, order)");
        }
        SpectralField u = SpectralField::constant(geom, ini.value);
        Eigen::VectorXd c = u.coeffs();
        c[idx] += ini.amplitude;
        return SpectralField(geom, c);
    }
    if (ini.type == "bubble") {
        const SpectralField b = geom->kind() == GeometryKind::Sphere
                                    ? sphere_bubble(geom, ini.center, ini.eps)
                                    : torus_bubble(geom, ini.center, ini.eps);
        return b + SpectralField::constant(geom, ini.background);
    }
    const auto values = read_values(ini.path);
    if (values.size() != geom->grid().size()) {
        throw ConfigError("path", "expected " + std::to_string(geom->grid().size()) +
                                      " grid values, found " + std::to_string(values.size()));
    }
    return SpectralField::from_grid(
        geom, Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
}

}  // namespace fracflow
