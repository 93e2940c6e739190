#pragma once

#include "bsv/config_file.hpp"
#include "bsv/quadrature.hpp"

#include <string>
#include <vector>

namespace bsv {

// Internal unit conventions: lengths in micrometers, wavenumbers in rad/um,
// angles in radians. Config files use nm/mm/mrad as indicated by key names.

struct PumpBeam {
    double wavelength_nm = 0.0;
    double fwhm_um = 0.0;       ///< FWHM of the pump spatial intensity profile
    double refractive_index = 1.0;
    double sigma_um = 0.0;      ///< fwhm / (2 sqrt(ln 2)), derived
    double k_p = 0.0;           ///< pump wavenumber, rad/um, derived
};

enum class SegmentKind { crystal, gap };

struct Segment {
    SegmentKind kind = SegmentKind::crystal;
    double length_um = 0.0;
    double walkoff_rad = 0.0;   ///< signed tilt of the pump Poynting vector; 0 for gaps
    bool is_nonlinear = false;
};

/// Requested discretization; resolved into a RadialGrid by default_grid().
struct GridSpec {
    int n_points = 256;
    int n_max = 32;
    double q_max_override = 0.0;     ///< rad/um; 0 means "use the q_max rule"
    double harmonic_loss_tol = 0.05; ///< accepted azimuthal truncation loss
};

/// Pixel layout for 1D cut observables (hard-edged square bins).
struct PixelSpec {
    double width_mrad = 0.04;
    double theta_max_mrad = 12.0;
};

/// Discretization of the walk-off (joint) solver.
struct RasterSpec {
    int n_phi = 64;        ///< uniform azimuthal samples; harmonics |n| < n_phi/2
    int n_points = 0;      ///< radial points; 0 means "use grid.n_points"
    int top_modes = 96;    ///< retained dominant Schmidt modes
    int iterations = 4;    ///< subspace iteration sweeps
};

struct Setup {
    PumpBeam pump;
    std::vector<Segment> segments;
    double gain = 0.0;
    double signal_wavenumber = 0.0;  ///< k_s = k_p / 2 (degenerate, paraxial)
    GridSpec grid;
    PixelSpec pixels;
    RasterSpec raster;

    bool has_walkoff() const;
    double shortest_crystal_um() const;
};

struct RadialGrid {
    int n_points = 0;
    double q_max = 0.0;              ///< rad/um
    std::vector<double> nodes;       ///< strictly increasing, all > 0
    std::vector<double> weights;
    int n_harmonics = 0;             ///< retained azimuthal orders n in [-n_max, n_max]
};

/// Validate a parsed scenario document and derive all secondary quantities.
/// Throws ConfigError with the offending field path.
Setup build_setup(const ConfigDoc& doc);

/// Gauss-Legendre radial grid on (0, q_max]. q_max is chosen so that the
/// phase-mismatch argument L q^2 / (4 k_p) of the shortest crystal reaches
/// 4 pi at the edge (main lobe plus three side lobes), unless overridden.
RadialGrid default_grid(const Setup& setup);

double q_max_rule(double k_p, double shortest_crystal_um);

} // namespace bsv
