#include "bsv/schmidt.hpp"

#include "bsv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace bsv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Joint real-orthogonal diagonalization of the commuting symmetric parts of
/// a symmetric unitary block: Z = Q diag(d) Q^T with |d_i| = 1.
void diagonalize_symmetric_unitary(const Eigen::MatrixXcd& z, Eigen::MatrixXd& q,
                                   Eigen::VectorXcd& d) {
    const int n = static_cast<int>(z.rows());
    Eigen::MatrixXd x = z.real(), y = z.imag();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(x);
    q = ex.eigenvectors();
    Eigen::VectorXd xv = ex.eigenvalues();
    // within clusters of equal x-eigenvalues, diagonalize the projected y
    int i = 0;
    while (i < n) {
        int j = i + 1;
        while (j < n && std::abs(xv(j) - xv(i)) < 1e-12 * std::max(1.0, std::abs(xv(i)))) ++j;
        if (j - i > 1) {
            Eigen::MatrixXd yb = q.middleCols(i, j - i).transpose() * y * q.middleCols(i, j - i);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ey(0.5 * (yb + yb.transpose()));
            q.middleCols(i, j - i) = (q.middleCols(i, j - i) * ey.eigenvectors()).eval();
        }
        i = j;
    }
    d = (q.transpose() * z * q).diagonal();
}

void fix_column_signs(Eigen::MatrixXcd& u) {
    for (int c = 0; c < u.cols(); ++c) {
        int imax = 0;
        double best = -1.0;
        for (int r = 0; r < u.rows(); ++r) {
            double a = std::norm(u(r, c));
            if (a > best) { best = a; imax = r; }
        }
        const Complex v = u(imax, c);
        const bool flip = (v.real() < 0.0) || (v.real() == 0.0 && v.imag() < 0.0);
        if (flip) u.col(c) = -u.col(c);
    }
}

} // namespace

TakagiResult takagi(const Eigen::MatrixXcd& m, double sym_tol, double block_tol,
                    double sv_cutoff) {
    const int n = static_cast<int>(m.rows());
    if (m.cols() != n) throw NumericalError("takagi: matrix must be square");
    const double scale = m.cwiseAbs().maxCoeff();
    if (scale > 0.0) {
        const double asym = (m - m.transpose()).cwiseAbs().maxCoeff() / scale;
        if (asym > sym_tol) {
            std::ostringstream msg;
            msg << "takagi: matrix asymmetry " << asym << " exceeds tolerance " << sym_tol;
            throw NumericalError(msg.str());
        }
    }

    Eigen::BDCSVD<Eigen::MatrixXcd> svd(0.5 * (m + m.transpose()),
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::MatrixXcd u = svd.matrixU();
    const Eigen::VectorXd s = svd.singularValues();

    // M = U S V^dag and M = M^T imply Z = U^dag conj(V) is block diagonal over
    // degenerate singular values, symmetric unitary within each block; the
    // aligned vectors are U E with E E^T = Z.
    const Eigen::MatrixXcd z = u.adjoint() * svd.matrixV().conjugate();
    const double smax = (n > 0) ? s(0) : 0.0;
    int i = 0;
    while (i < n) {
        if (s(i) <= sv_cutoff * smax) break;  // null space: alignment irrelevant
        int j = i + 1;
        while (j < n && std::abs(s(j) - s(i)) <= block_tol * smax) ++j;
        if (j - i == 1) {
            Complex zii = z(i, i);
            const double az = std::abs(zii);
            zii = (az > 0.0) ? zii / az : Complex(1.0, 0.0);
            u.col(i) *= std::sqrt(zii);
        } else {
            Eigen::MatrixXcd zb = z.block(i, i, j - i, j - i);
            zb = 0.5 * (zb + zb.transpose()).eval();
            Eigen::MatrixXd q;
            Eigen::VectorXcd d;
            diagonalize_symmetric_unitary(zb, q, d);
            Eigen::MatrixXcd e = q.cast<Complex>();
            for (int c = 0; c < e.cols(); ++c) {
                Complex dc = d(c);
                const double ad = std::abs(dc);
                dc = (ad > 0.0) ? dc / ad : Complex(1.0, 0.0);
                e.col(c) *= std::sqrt(dc);
            }
            u.middleCols(i, j - i) = (u.middleCols(i, j - i) * e).eval();
        }
        i = j;
    }
    fix_column_signs(u);

    if (scale > 0.0) {
        const Eigen::MatrixXcd rec = u * s.asDiagonal() * u.transpose();
        const double resid = (rec - m).norm() / m.norm();
        if (resid > 1e-10) {
            std::ostringstream msg;
            msg << "takagi: factorization residual " << resid;
            throw NumericalError(msg.str());
        }
    }
    return {std::move(u), s};
}

const SchmidtMode* SchmidtModes::find(int m, int n) const {
    for (const auto& e : entries)
        if (e.m == m && e.n == n) return &e;
    return nullptr;
}

SchmidtModes radial_schmidt(const TpaKernel& kernel, double lambda_min, double cum_tol) {
    const RadialGrid& grid = kernel.grid;
    const int nq = grid.n_points;
    Eigen::VectorXd sw(nq), isw(nq);
    for (int k = 0; k < nq; ++k) {
        sw(k) = std::sqrt(grid.weights[k] * grid.nodes[k]);
        isw(k) = 1.0 / std::sqrt(grid.weights[k]);
    }

    struct Raw {
        int n;
        Eigen::MatrixXcd u;
        Eigen::VectorXd s;
    };
    std::vector<Raw> raw(kernel.n_max + 1);

    // +-n harmonics are degenerate for exchange-symmetric kernels; verify and
    // factor each |n| once. Exceptions may not cross the omp region boundary.
    std::string failure;
#pragma omp parallel for schedule(dynamic)
    for (int n = 0; n <= kernel.n_max; ++n) {
        try {
            const Eigen::MatrixXcd& cp = kernel.harmonic(n);
            const Eigen::MatrixXcd& cm = kernel.harmonic(-n);
            const double scale = std::max(cp.cwiseAbs().maxCoeff(), 1e-300);
            const double mirror = (cp - cm).cwiseAbs().maxCoeff() / scale;
            if (mirror > 1e-11)
                throw NumericalError("radial_schmidt: harmonics +-" + std::to_string(n) +
                                     " differ; kernel is not exchange symmetric");
            Eigen::MatrixXcd m = kTwoPi * sw.asDiagonal() * cp * sw.asDiagonal();
            TakagiResult t = takagi(m);
            raw[n] = {n, std::move(t.u), std::move(t.s)};
        } catch (const std::exception& e) {
#pragma omp critical
            if (failure.empty()) failure = e.what();
        }
    }
    if (!failure.empty()) throw NumericalError(failure);

    // global truncation: modes sorted by weight, +-n pairs kept together
    struct Cand {
        double lambda;
        int n, m;
    };
    std::vector<Cand> cands;
    for (const Raw& r : raw)
        for (int m = 0; m < r.s.size(); ++m) {
            const double lam = r.s(m) * r.s(m);
            if (lam >= lambda_min) cands.push_back({lam, r.n, m});
        }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.lambda != b.lambda) return a.lambda > b.lambda;
        if (a.n != b.n) return a.n < b.n;
        return a.m < b.m;
    });

    SchmidtModes modes;
    modes.grid = grid;
    double kept = 0.0;
    for (const Cand& c : cands) {
        if (kept >= 1.0 - cum_tol) break;
        Eigen::VectorXcd u = raw[c.n].u.col(c.m).cwiseProduct(isw.cast<Complex>());
        const int base = static_cast<int>(modes.entries.size());
        modes.entries.push_back({c.m, c.n, c.lambda, u, base});
        kept += c.lambda;
        if (c.n > 0) {
            modes.entries.push_back({c.m, -c.n, c.lambda, std::move(u), base});
            modes.entries[base].partner = base + 1;
            kept += c.lambda;
        }
    }
    modes.truncation_loss = 1.0 - kept;
    return modes;
}

TpaKernel reconstruct_tpa(const SchmidtModes& modes, const RadialGrid& grid) {
    TpaKernel kernel;
    kernel.grid = grid;
    kernel.n_max = grid.n_harmonics;
    const int nq = grid.n_points;
    kernel.harmonics.assign(2 * kernel.n_max + 1, Eigen::MatrixXcd::Zero(nq, nq));
    kernel.norm_constant = 1.0;
    Eigen::VectorXd isq(nq);
    for (int k = 0; k < nq; ++k) isq(k) = 1.0 / std::sqrt(grid.nodes[k]);

    for (const SchmidtMode& e : modes.entries) {
        if (std::abs(e.n) > kernel.n_max) continue;
        const Eigen::VectorXcd f = std::sqrt(e.lambda) / kTwoPi *
                                   e.u.cwiseProduct(isq.cast<Complex>());
        kernel.harmonic(e.n).noalias() += f * f.transpose();
    }
    return kernel;
}

double kernel_l2_distance(const TpaKernel& a, const TpaKernel& b) {
    const RadialGrid& grid = a.grid;
    double diff = 0.0, ref = 0.0;
    for (int n = -a.n_max; n <= a.n_max; ++n) {
        const Eigen::MatrixXcd& ma = a.harmonic(n);
        const Eigen::MatrixXcd& mb = b.harmonic(n);
        for (int j = 0; j < grid.n_points; ++j)
            for (int k = 0; k < grid.n_points; ++k) {
                const double w =
                    grid.weights[j] * grid.nodes[j] * grid.weights[k] * grid.nodes[k];
                diff += w * std::norm(ma(j, k) - mb(j, k));
                ref += w * std::norm(ma(j, k));
            }
    }
    return std::sqrt(diff / ref);
}

ModeProfile mode_profile(const SchmidtModes& modes, int m, int n) {
    const SchmidtMode* e = modes.find(m, n);
    if (!e)
        throw NumericalError("mode_profile: unknown mode (" + std::to_string(m) + "," +
                             std::to_string(n) + ")");
    ModeProfile p;
    p.n = n;
    p.u = e->u;
    int imax = 0;
    double best = -1.0;
    for (int k = 0; k < p.u.size(); ++k)
        if (std::norm(p.u(k)) > best) { best = std::norm(p.u(k)); imax = k; }
    const Complex v = p.u(imax);
    if (std::abs(v) > 0.0) p.u *= std::conj(v) / std::abs(v);
    return p;
}

} // namespace bsv
