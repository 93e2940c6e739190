#pragma once

#include "bsv/config.hpp"
#include "bsv/exec.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace bsv {

/// Polar discretization (radial quadrature x uniform azimuth) used by the
/// joint solver for setups with transverse walk-off, where the amplitude
/// depends on both azimuths separately. Retained harmonic products are
/// |n| < n_phi / 2.
struct PolarRaster {
    RadialGrid radial;
    int n_phi = 64;

    int dim() const { return radial.n_points * n_phi; }
    double dphi() const;
};

PolarRaster make_raster(const Setup& setup);

/// The sampled amplitude as a banded linear operator over the raster, with
/// quadrature weights folded in symmetrically:
///   M[(j,a),(k,b)] = s F(q_j, phi_a; q_k, phi_b) sqrt(w_j q_j dphi w_k q_k dphi).
/// The pump envelope confines |q_s + q_i|, so only radially and azimuthally
/// close-to-opposite pairs couple; everything outside the band is dropped.
/// Entries are recomputed on the fly; no matrix is materialized.
class JointKernelOperator {
public:
    JointKernelOperator(const Setup& setup, const PolarRaster& raster);

    int dim() const { return raster_.dim(); }
    const PolarRaster& raster() const { return raster_; }
    double norm_constant() const { return scale_; }

    /// y = M x for a block of columns.
    void apply(const Eigen::MatrixXcd& x, Eigen::MatrixXcd& y,
               Exec exec = Exec::parallel) const;
    /// y = M^dag x; M is complex symmetric so M^dag = conj(M).
    void apply_adjoint(const Eigen::MatrixXcd& x, Eigen::MatrixXcd& y,
                       Exec exec = Exec::parallel) const;

    /// diag(M M^dag), the exact low-gain intensity profile.
    Eigen::VectorXd row_norms2(Exec exec = Exec::parallel) const;

private:
    struct Band {
        int k_lo = 0, k_hi = -1;               // radial window
        std::vector<int> half_window;          // per k in window: azimuthal half width
    };
    void scan_norm();

    const Setup* setup_;
    PolarRaster raster_;
    std::vector<Band> bands_;                  // per radial ring j
    std::vector<double> sw_;                   // sqrt(w q dphi) per radial node
    double band_q_ = 0.0;
    double scale_ = 1.0;                       // normalizes ||M||_F to 1
};

/// Dominant Schmidt modes of the joint kernel, found by seeded block subspace
/// iteration on M M^dag. Weights are normalized against the full kernel, so
/// captured_weight < 1 and the remainder is the (reported) truncation.
struct JointModes {
    PolarRaster raster;
    std::vector<double> lambda;     ///< descending
    Eigen::MatrixXcd vectors;       ///< dim x k, orthonormal columns
    double captured_weight = 0.0;
};

JointModes joint_schmidt(const JointKernelOperator& op, int top_k, int iterations,
                         uint64_t seed = 0x5eedULL, Exec exec = Exec::parallel);

/// 2D angular intensity map on the polar raster; intensity is the mean photon
/// density per d^2 q at (q, phi).
struct Map2d {
    std::vector<double> q;
    std::vector<double> phi;
    Eigen::MatrixXd intensity;      ///< n_q x n_phi
    double k_s = 0.0;

    /// 1D cut along the principal plane: (theta_mrad signed, intensity).
    std::pair<std::vector<double>, std::vector<double>> principal_cut() const;
};

/// Intensity map at gain G. Uses the exact quadratic route (all modes) deep in
/// the low-gain regime and the dominant-mode sum otherwise.
Map2d joint_spectrum(const Setup& setup, const JointKernelOperator& op,
                     const JointModes& modes, double gain);

} // namespace bsv
