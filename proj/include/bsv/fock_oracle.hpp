#pragma once

#include <Eigen/Dense>

#include <complex>
#include <utility>
#include <vector>

namespace bsv {

using Complex = std::complex<double>;

/// Dense truncated-Fock state over one or two modes. Amplitudes are the exact
/// closed-form squeezed-vacuum coefficients cut at the given occupancy, kept
/// unnormalized so the norm deficit is visible.
class FockBlock {
public:
    static FockBlock two_mode_squeezed(double r, int cutoff);
    static FockBlock single_mode_squeezed(double r, int cutoff);

    int modes() const { return n_modes_; }
    int cutoff() const { return cutoff_; }
    double norm2() const;

    /// An annihilation (dagger=false) or creation (dagger=true) operator on a
    /// local mode slot.
    struct Op {
        int slot = 0;
        bool dagger = false;
    };

    /// <psi| op[0] op[1] ... |psi> by direct operator application.
    Complex expect(const std::vector<Op>& ops) const;

private:
    FockBlock(int n_modes, int cutoff);
    int index(int n0, int n1) const { return n0 * stride_ + n1; }
    Eigen::VectorXcd apply_chain(const std::vector<Op>& ops) const;

    int n_modes_;
    int cutoff_;   ///< physical occupancy bound
    int size_;     ///< padded per-mode dimension (cutoff + headroom + 1)
    int stride_;
    Eigen::VectorXcd amp_;
};

/// Kind of elementary squeezer acting on one Schmidt "pair": a two-mode
/// squeezer on a +-n pair, or a single-mode squeezer on an n = 0 mode.
struct SqueezeSpec {
    enum class Kind { pair, single };
    Kind kind = Kind::pair;
    double r = 0.0;
};

/// Product state of independent squeezed blocks in a truncated number basis.
struct TruncatedState {
    std::vector<FockBlock> blocks;
    std::vector<std::pair<int, int>> slot_of_mode;  ///< global mode -> (block, slot)
    std::vector<double> squeeze_params;
    int cutoff = 0;
    double norm_deficit = 0.0;

    int n_modes() const { return static_cast<int>(slot_of_mode.size()); }
};

/// Two-mode squeezed vacuum with amplitudes tanh^k(r)/cosh(r) on |k,k>.
/// Throws NumericalError if the norm deficit exceeds max_deficit.
TruncatedState evolve_tms(double r, int cutoff, double max_deficit = 1e-8);

/// General product of squeezed blocks (at most two pairs' worth of modes).
TruncatedState evolve_blocks(const std::vector<SqueezeSpec>& specs, int cutoff,
                             double max_deficit = 1e-8);

/// A measured "pixel" mode a_p = sum_i coeff_i a_i over the state's modes.
struct PixelOperator {
    Eigen::VectorXcd coeff;
};

/// First and second photon-number moments of pixel operators, computed by
/// direct operator application in the truncated basis.
struct OracleMoments {
    Eigen::VectorXd n;    ///< <N_p>
    Eigen::MatrixXd nn;   ///< <N_p N_q>, diagonal <N_p^2>

    double var(int p) const { return nn(p, p) - n(p) * n(p); }
    double cov(int p, int q) const { return nn(p, q) - n(p) * n(q); }
    double var_diff(int p, int q) const { return var(p) + var(q) - 2.0 * cov(p, q); }
    /// <N_p N_q> / (<N_p><N_q>); the auto case (p == q) uses <N^2>/<N>^2.
    double g2(int p, int q) const { return nn(p, q) / (n(p) * n(q)); }
};

OracleMoments oracle_moments(const TruncatedState& state,
                             const std::vector<PixelOperator>& pixels);

/// Largest relative shift between two moment sets (same pixel layout);
/// used to flag truncation-sensitive moments when the cutoff is increased.
double moment_sensitivity(const OracleMoments& a, const OracleMoments& b);

} // namespace bsv
