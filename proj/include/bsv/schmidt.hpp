#pragma once

#include "bsv/tpa.hpp"

#include <Eigen/Dense>

#include <vector>

namespace bsv {

/// Result of the symmetric (Takagi) factorization M = U diag(s) U^T of a
/// complex symmetric matrix, singular values descending.
struct TakagiResult {
    Eigen::MatrixXcd u;
    Eigen::VectorXd s;
};

/// Takagi factorization via SVD plus per-mode phase alignment; singular-value
/// blocks that are degenerate within block_tol (relative) are re-aligned
/// jointly. Columns below sv_cutoff * s_max are left unaligned.
/// Throws NumericalError if M is not symmetric to sym_tol (relative) or if
/// the factorization residual exceeds 1e-10.
TakagiResult takagi(const Eigen::MatrixXcd& m, double sym_tol = 1e-10,
                    double block_tol = 1e-9, double sv_cutoff = 1e-12);

struct SchmidtMode {
    int m = 0;              ///< radial index within the harmonic, by descending weight
    int n = 0;              ///< azimuthal harmonic
    double lambda = 0.0;    ///< Schmidt weight
    Eigen::VectorXcd u;     ///< radial profile at grid nodes, orthonormal in L2(dq)
    int partner = -1;       ///< index of the (m, -n) entry (self for n = 0)
};

struct SchmidtModes {
    RadialGrid grid;
    std::vector<SchmidtMode> entries;   ///< sorted by descending lambda
    double truncation_loss = 0.0;

    const SchmidtMode* find(int m, int n) const;
};

/// Per-harmonic radial Schmidt decomposition of a sampled kernel using the
/// quadrature-weighted Nystrom form  M_n(j,k) = 2pi sqrt(w_j q_j) chi_n
/// sqrt(w_k q_k).  Harmonics +-n are exchange-degenerate and share weights
/// and profiles. Modes are truncated at lambda < lambda_min or once the kept
/// weight reaches 1 - cum_tol.
SchmidtModes radial_schmidt(const TpaKernel& kernel, double lambda_min = 1e-8,
                            double cum_tol = 1e-8);

/// Kernel rebuilt from the modes; inverse of radial_schmidt up to truncation.
TpaKernel reconstruct_tpa(const SchmidtModes& modes, const RadialGrid& grid);

/// Relative weighted L2 distance between two sampled kernels on one grid.
double kernel_l2_distance(const TpaKernel& a, const TpaKernel& b);

/// Radial profile of mode (m, n) under the display phase convention (largest
/// magnitude sample real positive) together with its angular order n.
struct ModeProfile {
    Eigen::VectorXcd u;
    int n = 0;
};
ModeProfile mode_profile(const SchmidtModes& modes, int m, int n);

} // namespace bsv
