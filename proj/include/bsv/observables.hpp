#pragma once

#include "bsv/config.hpp"
#include "bsv/exec.hpp"
#include "bsv/schmidt.hpp"

#include <Eigen/Dense>

#include <vector>

namespace bsv {

/// 1D cut of square angular pixels through the origin along a fixed azimuth
/// (theta < 0 maps to azimuth + pi). Angles are theta = q / k_s.
struct PixelCut {
    std::vector<double> theta_mrad;  ///< centers, ascending, step = width
    double width_mrad = 0.04;
    double azimuth = 0.0;            ///< direction of the theta > 0 half-axis
    std::vector<double> q_center;    ///< rad/um
    std::vector<double> phi;
    double area = 0.0;               ///< (k_s width)^2, hard-edged square bin

    int index_of(double theta0_mrad) const;  ///< throws if off-grid
};

PixelCut make_pixel_cut(const Setup& setup, double theta_max_mrad, double width_mrad,
                        double azimuth);

/// Overlaps c_{p,mode} of every pixel mode with every Schmidt mode, obtained
/// by Nystrom evaluation of the radial profiles at the pixel centers.
struct ModeOverlaps {
    PixelCut cut;
    Eigen::MatrixXcd c;              ///< n_pixels x n_modes
    std::vector<int> partner;        ///< mode pairing (m,n) <-> (m,-n)
    std::vector<double> lambda;
};

ModeOverlaps pixel_mode_overlaps(const Setup& setup, const TpaKernel& kernel,
                                 const SchmidtModes& modes, const PixelCut& cut);

/// Plane-wave/pixel first and second moments: mean photon number N, normal
/// correlator C = <a+ a> and anomalous correlator S = <a a> between pixels.
struct MomentTables {
    PixelCut cut;
    double gain = 0.0;
    Eigen::VectorXd n;
    Eigen::MatrixXcd c;
    Eigen::MatrixXcd s;
};

MomentTables correlators(const ModeOverlaps& overlaps, double gain,
                         Exec exec = Exec::parallel);

/// N plus single C/S columns against a fixed pixel; enough for covariance
/// profiles and much cheaper than the full tables.
struct MomentColumn {
    int p0 = 0;
    Eigen::VectorXd n;
    Eigen::VectorXcd c;
    Eigen::VectorXcd s;
};
MomentColumn correlator_column(const ModeOverlaps& overlaps, double gain, int p0);

/// Photon-number covariance between pixels: |C|^2 + |S|^2 for p != q;
/// the variance Var N_p = C_pp^2 + C_pp + |S_pp|^2 on the diagonal.
double covariance(const MomentTables& t, int p, int q);
double variance(const MomentTables& t, int p);

/// Normalized second-order correlation. Cross pixels:
/// 1 + (|C|^2+|S|^2)/(N N'); auto: <N^2>/<N>^2 including the shot term.
double g2(const MomentTables& t, int p, int q);

struct AngularSpectrum {
    enum class Norm { raw, max1 };
    std::vector<double> theta_mrad;
    std::vector<double> intensity;
    Norm norm = Norm::raw;
};

/// Var(N(theta) - N(theta0)) over the cut, normalized to its maximum; exactly
/// zero at theta0.
AngularSpectrum variance_difference(const MomentTables& t, double theta0_mrad);

/// Mean photon-number density sum_mn |u_mn(q)|^2 sinh^2(G sqrt(lambda)) / (2 pi q)
/// evaluated at the radial grid nodes.
Eigen::VectorXd spectrum_at_nodes(const SchmidtModes& modes, double gain);

/// The same density on a uniform angular cut (mirrored through zero).
AngularSpectrum mean_photon_spectrum(const Setup& setup, const TpaKernel& kernel,
                                     const SchmidtModes& modes, double gain,
                                     double theta_max_mrad, double step_mrad,
                                     AngularSpectrum::Norm norm);

/// FWHM (mrad) of the covariance profile |C(theta, theta_peak)|^2 +
/// |S(theta, theta_peak)|^2 around the spectrum peak, by linear interpolation
/// at half maximum. Throws NumericalError when the peak is narrower than two
/// pixels or the half level is not crossed inside the cut.
double covariance_fwhm(const ModeOverlaps& overlaps, double gain);

/// FWHM of the central peak of a sampled curve around its global maximum.
double central_peak_fwhm(const std::vector<double>& x, const std::vector<double>& y);

} // namespace bsv
