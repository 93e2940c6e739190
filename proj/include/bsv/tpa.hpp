#pragma once

#include "bsv/config.hpp"
#include "bsv/exec.hpp"

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace bsv {

using Complex = std::complex<double>;

/// sin(x)/x with the removable singularity handled by series below 1e-8.
double sinc(double x);

/// Gaussian pump envelope exp(-sigma^2 Q^2 / 2), Q = |q_s + q_i|.
double pump_envelope(double Q, double sigma);

/// Two-photon amplitude of a single zero-walk-off crystal at transverse
/// wavenumbers q_s, q_i (rad/um). norm multiplies the raw amplitude.
Complex tpa_single_crystal(const Eigen::Vector2d& q_s, const Eigen::Vector2d& q_i,
                           const Setup& setup, double norm = 1.0);

/// Two-photon amplitude of the full segment stack. Each crystal j contributes
/// exp(i Theta_j) L_j sinc(D_j L_j / 2) exp(i D_j L_j / 2) under the pump
/// envelope, with longitudinal mismatch
///   D_j = |q_s - q_i|^2 / (2 k_p) + rho_j (q_s + q_i) . x
/// and Theta_j the mismatch phase accumulated over all preceding segments;
/// gaps only accumulate phase. Reduces to tpa_single_crystal for one crystal.
Complex tpa_multi_segment(const Eigen::Vector2d& q_s, const Eigen::Vector2d& q_i,
                          const Setup& setup, double norm = 1.0);

/// The sampled two-photon amplitude of a zero-walk-off setup, stored per
/// azimuthal harmonic as radial matrices chi_n(q_s, q_i) on the grid.
/// Normalized so that the total Schmidt weight equals one:
///   (2 pi)^2 sum_n  int |chi_n|^2 q q' dq dq' = 1.
struct TpaKernel {
    RadialGrid grid;
    int n_max = 0;
    std::vector<Eigen::MatrixXcd> harmonics;  ///< index n + n_max, n in [-n_max, n_max]
    double norm_constant = 1.0;               ///< scale applied to the raw amplitude
    double harmonic_loss = 0.0;               ///< |F|^2 fraction beyond retained harmonics

    const Eigen::MatrixXcd& harmonic(int n) const { return harmonics[n + n_max]; }
    Eigen::MatrixXcd& harmonic(int n) { return harmonics[n + n_max]; }
};

/// Angular decomposition of the sampled amplitude,
///   chi_n(q_s, q_i) = (1/2pi) int F(q_s, q_i, dphi) e^{-i n dphi} d(dphi),
/// by uniform sampling over 4 n_max angles and a discrete Fourier transform.
/// Throws NumericalError if the harmonic truncation loss exceeds the grid
/// tolerance, and ConfigError for setups with walk-off (those are handled by
/// the joint solver).
TpaKernel sample_kernel(const Setup& setup, const RadialGrid& grid,
                        Exec exec = Exec::parallel);

/// chi_n(q, q_k) rows at arbitrary radial positions q, carrying the kernel's
/// normalization. Used to evaluate Schmidt modes off the quadrature grid.
std::vector<Eigen::MatrixXcd> resample_harmonic_rows(const Setup& setup,
                                                     const TpaKernel& kernel,
                                                     const std::vector<double>& q_new);

/// Harmonic coefficients (1/N) sum_a f(phi_a) e^{-i n phi_a} of uniformly
/// sampled angular data, n in [-n_max, n_max], returned at index n + n_max.
std::vector<Complex> angular_project(const std::vector<Complex>& samples, int n_max);

} // namespace bsv
