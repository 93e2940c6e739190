#include "bsv/config.hpp"

#include "bsv/errors.hpp"

#include <cmath>
#include <numbers>

namespace bsv {

namespace {

const ConfigValue& require(const ConfigTable& tab, const std::string& section,
                           const std::string& key) {
    auto it = tab.find(key);
    if (it == tab.end()) throw ConfigError("missing field " + section + "." + key);
    return it->second;
}

double require_number(const ConfigTable& tab, const std::string& section,
                      const std::string& key) {
    const ConfigValue& v = require(tab, section, key);
    if (v.kind != ConfigValue::Kind::number)
        throw ConfigError(section + "." + key + ": expected a number");
    return v.num;
}

double number_or(const ConfigTable& tab, const std::string& key, double fallback) {
    auto it = tab.find(key);
    if (it == tab.end()) return fallback;
    if (it->second.kind != ConfigValue::Kind::number)
        throw ConfigError(key + ": expected a number");
    return it->second.num;
}

} // namespace

bool Setup::has_walkoff() const {
    for (const auto& s : segments)
        if (s.walkoff_rad != 0.0) return true;
    return false;
}

double Setup::shortest_crystal_um() const {
    double best = 0.0;
    for (const auto& s : segments)
        if (s.is_nonlinear && (best == 0.0 || s.length_um < best)) best = s.length_um;
    return best;
}

Setup build_setup(const ConfigDoc& doc) {
    Setup setup;

    if (!doc.has_table("pump")) throw ConfigError("missing section [pump]");
    const ConfigTable& pump = doc.tables.at("pump");
    setup.pump.wavelength_nm = require_number(pump, "pump", "wavelength_nm");
    setup.pump.fwhm_um = require_number(pump, "pump", "fwhm_um");
    setup.pump.refractive_index = number_or(pump, "refractive_index", 1.0);
    if (setup.pump.wavelength_nm <= 0) throw ConfigError("pump.wavelength_nm: must be > 0");
    if (setup.pump.fwhm_um <= 0) throw ConfigError("pump.fwhm_um: must be > 0");
    if (setup.pump.refractive_index <= 0) throw ConfigError("pump.refractive_index: must be > 0");
    setup.pump.sigma_um = setup.pump.fwhm_um / (2.0 * std::sqrt(std::numbers::ln2));
    setup.pump.k_p = 2.0 * std::numbers::pi * setup.pump.refractive_index /
                     (setup.pump.wavelength_nm * 1e-3);
    setup.signal_wavenumber = setup.pump.k_p / 2.0;

    auto segs = doc.arrays.find("segment");
    size_t n_segs = (segs == doc.arrays.end()) ? 0 : segs->second.size();
    for (size_t i = 0; i < n_segs; ++i) {
        const ConfigTable& tab = segs->second[i];
        std::string path = "segment[" + std::to_string(i) + "]";
        Segment s;
        const ConfigValue& kind = require(tab, path, "kind");
        if (kind.kind != ConfigValue::Kind::string || (kind.str != "crystal" && kind.str != "gap"))
            throw ConfigError(path + ".kind: expected \"crystal\" or \"gap\"");
        s.kind = (kind.str == "crystal") ? SegmentKind::crystal : SegmentKind::gap;
        s.is_nonlinear = (s.kind == SegmentKind::crystal);
        s.length_um = require_number(tab, path, "length_mm") * 1e3;
        if (s.length_um <= 0) throw ConfigError(path + ".length_mm: must be > 0");
        s.walkoff_rad = number_or(tab, "walkoff_mrad", 0.0) * 1e-3;
        if (s.kind == SegmentKind::gap && s.walkoff_rad != 0.0)
            throw ConfigError(path + ".walkoff_mrad: gap segments must have zero walk-off");
        setup.segments.push_back(s);
    }
    if (setup.shortest_crystal_um() == 0.0)
        throw ConfigError("segment: no nonlinear segment (need at least one crystal)");

    setup.gain = number_or(doc.root, "gain", 0.0);
    if (doc.root.count("gain") == 0) throw ConfigError("missing field gain");
    if (setup.gain < 0) throw ConfigError("gain: must be >= 0");

    if (doc.has_table("grid")) {
        const ConfigTable& g = doc.tables.at("grid");
        setup.grid.n_points = static_cast<int>(number_or(g, "n_points", setup.grid.n_points));
        setup.grid.n_max = static_cast<int>(number_or(g, "n_max", setup.grid.n_max));
        setup.grid.q_max_override = number_or(g, "q_max_override", 0.0);
        setup.grid.harmonic_loss_tol =
            number_or(g, "harmonic_loss_tol", setup.grid.harmonic_loss_tol);
        if (setup.grid.n_points < 8) throw ConfigError("grid.n_points: must be >= 8");
        if (setup.grid.n_max < 0) throw ConfigError("grid.n_max: must be >= 0");
        if (setup.grid.q_max_override < 0) throw ConfigError("grid.q_max_override: must be >= 0");
    }
    if (doc.has_table("pixels")) {
        const ConfigTable& p = doc.tables.at("pixels");
        setup.pixels.width_mrad = number_or(p, "width_mrad", setup.pixels.width_mrad);
        setup.pixels.theta_max_mrad = number_or(p, "theta_max_mrad", setup.pixels.theta_max_mrad);
        if (setup.pixels.width_mrad <= 0) throw ConfigError("pixels.width_mrad: must be > 0");
        if (setup.pixels.theta_max_mrad <= setup.pixels.width_mrad)
            throw ConfigError("pixels.theta_max_mrad: must exceed pixels.width_mrad");
    }
    if (doc.has_table("raster")) {
        const ConfigTable& r = doc.tables.at("raster");
        setup.raster.n_phi = static_cast<int>(number_or(r, "n_phi", setup.raster.n_phi));
        setup.raster.n_points = static_cast<int>(number_or(r, "n_points", 0.0));
        setup.raster.top_modes = static_cast<int>(number_or(r, "top_modes", setup.raster.top_modes));
        setup.raster.iterations = static_cast<int>(number_or(r, "iterations", setup.raster.iterations));
        if (setup.raster.n_phi < 8 || setup.raster.n_phi % 2 != 0)
            throw ConfigError("raster.n_phi: must be even and >= 8");
        if (setup.raster.top_modes < 1) throw ConfigError("raster.top_modes: must be >= 1");
        if (setup.raster.iterations < 1) throw ConfigError("raster.iterations: must be >= 1");
    }
    return setup;
}

double q_max_rule(double k_p, double shortest_crystal_um) {
    return std::sqrt(16.0 * std::numbers::pi * k_p / shortest_crystal_um);
}

RadialGrid default_grid(const Setup& setup) {
    RadialGrid grid;
    grid.n_points = setup.grid.n_points;
    grid.n_harmonics = setup.grid.n_max;
    grid.q_max = setup.grid.q_max_override > 0.0
                     ? setup.grid.q_max_override
                     : q_max_rule(setup.pump.k_p, setup.shortest_crystal_um());
    Quadrature q = gauss_legendre(grid.n_points, 0.0, grid.q_max);
    grid.nodes = std::move(q.nodes);
    grid.weights = std::move(q.weights);
    return grid;
}

} // namespace bsv
