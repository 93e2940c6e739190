#include "bsv/joint.hpp"

#include "bsv/errors.hpp"
#include "bsv/tpa.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace bsv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// envelope support: exp(-sigma^2 Q^2 / 2) < 4e-8 beyond Q = 5.5 / sigma
constexpr double kBandSigmas = 5.5;

struct SegTerm {
    double length;
    double walkoff;
    bool nonlinear;
};

std::vector<SegTerm> seg_terms(const Setup& setup) {
    std::vector<SegTerm> v;
    for (const Segment& s : setup.segments)
        v.push_back({s.length_um, s.walkoff_rad, s.is_nonlinear});
    return v;
}

} // namespace

double PolarRaster::dphi() const { return kTwoPi / n_phi; }

PolarRaster make_raster(const Setup& setup) {
    PolarRaster r;
    r.n_phi = setup.raster.n_phi;
    Setup tmp = setup;
    if (setup.raster.n_points > 0) tmp.grid.n_points = setup.raster.n_points;
    r.radial = default_grid(tmp);
    return r;
}

JointKernelOperator::JointKernelOperator(const Setup& setup, const PolarRaster& raster)
    : setup_(&setup), raster_(raster) {
    const RadialGrid& g = raster_.radial;
    const int nq = g.n_points;
    const double dphi = raster_.dphi();
    band_q_ = kBandSigmas / setup.pump.sigma_um;

    sw_.resize(nq);
    for (int k = 0; k < nq; ++k) sw_[k] = std::sqrt(g.weights[k] * g.nodes[k] * dphi);

    bands_.resize(nq);
    for (int j = 0; j < nq; ++j) {
        Band& b = bands_[j];
        b.k_lo = nq;
        b.k_hi = -1;
        for (int k = 0; k < nq; ++k) {
            if (std::abs(g.nodes[k] - g.nodes[j]) > band_q_) continue;
            b.k_lo = std::min(b.k_lo, k);
            b.k_hi = std::max(b.k_hi, k);
        }
        for (int k = b.k_lo; k <= b.k_hi; ++k) {
            const double qj = g.nodes[j], qk = g.nodes[k];
            const double t = (band_q_ * band_q_ - (qj - qk) * (qj - qk)) / (2.0 * qj * qk);
            int hw;
            if (t >= 2.0) {
                hw = raster_.n_phi / 2;
            } else {
                const double dmax = std::acos(1.0 - t);
                hw = std::min(raster_.n_phi / 2, static_cast<int>(std::ceil(dmax / dphi)) + 1);
            }
            b.half_window.push_back(hw);
        }
    }
    scan_norm();
}

namespace {

/// Per-(j,k,offset) geometry: the difference magnitude and the pump-sum
/// magnitude are independent of the common rotation angle; only the
/// principal-plane projection Q_x = |Q| cos(phi_a + beta) varies with a.
struct PairGeom {
    double diff2;
    double env;
    double qx_c, qx_s;  ///< Q_x = qx_c cos(phi_a) + qx_s sin(phi_a)
};

inline PairGeom pair_geom(double qj, double qk, double delta, double sigma) {
    PairGeom p;
    const double cd = std::cos(delta), sd = std::sin(delta);
    // q_i at phi_a + pi + delta relative to q_s at phi_a
    const double sum2 = qj * qj + qk * qk - 2.0 * qj * qk * cd;
    p.diff2 = qj * qj + qk * qk + 2.0 * qj * qk * cd;
    p.env = std::exp(-0.5 * sigma * sigma * sum2);
    // q_s + q_i = e^{i phi_a} (qj - qk e^{i delta}) in complex notation
    p.qx_c = qj - qk * cd;
    p.qx_s = qk * sd;
    return p;
}

inline Complex stack_amp(const std::vector<SegTerm>& segs, double diff2, double qx,
                         double k_p) {
    const double base = diff2 / (2.0 * k_p);
    Complex amp(0.0, 0.0);
    double theta = 0.0;
    for (const SegTerm& s : segs) {
        const double mis = base + s.walkoff * qx;
        const double half = 0.5 * mis * s.length;
        if (s.nonlinear) amp += std::polar(s.length * sinc(half), theta + half);
        theta += mis * s.length;
    }
    return amp;
}

} // namespace

void JointKernelOperator::apply(const Eigen::MatrixXcd& x, Eigen::MatrixXcd& y,
                                Exec exec) const {
    const RadialGrid& g = raster_.radial;
    const int nq = g.n_points;
    const int na = raster_.n_phi;
    const int nrhs = static_cast<int>(x.cols());
    const double dphi = raster_.dphi();
    const double sigma = setup_->pump.sigma_um;
    const double k_p = setup_->pump.k_p;
    const auto segs = seg_terms(*setup_);
    y.resize(raster_.dim(), nrhs);

    std::vector<double> ca(na), sa(na);
    for (int a = 0; a < na; ++a) {
        ca[a] = std::cos(a * dphi);
        sa[a] = std::sin(a * dphi);
    }

    auto process_ring = [&](int j) {
        const Band& b = bands_[j];
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(na, nrhs);
        for (int k = b.k_lo; k <= b.k_hi; ++k) {
            const int hw = b.half_window[k - b.k_lo];
            const double wjk = scale_ * sw_[j] * sw_[k];
            for (int d = -hw; d <= hw; ++d) {
                const PairGeom pg = pair_geom(g.nodes[j], g.nodes[k], d * dphi, sigma);
                if (pg.env * wjk < 1e-16) continue;
                for (int a = 0; a < na; ++a) {
                    const double qx = pg.qx_c * ca[a] + pg.qx_s * sa[a];
                    const Complex m =
                        wjk * pg.env * stack_amp(segs, pg.diff2, qx, k_p);
                    int bidx = a + na / 2 + d;
                    bidx -= na * ((bidx >= na) ? 1 : 0);
                    bidx += na * ((bidx < 0) ? 1 : 0);
                    acc.row(a) += m * x.row(k * na + bidx);
                }
            }
        }
        y.middleRows(j * na, na) = acc;
    };

    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int j = 0; j < nq; ++j) process_ring(j);
    } else {
        for (int j = 0; j < nq; ++j) process_ring(j);
    }
}

void JointKernelOperator::apply_adjoint(const Eigen::MatrixXcd& x, Eigen::MatrixXcd& y,
                                        Exec exec) const {
    apply(x.conjugate(), y, exec);
    y = y.conjugate();
}

Eigen::VectorXd JointKernelOperator::row_norms2(Exec exec) const {
    const RadialGrid& g = raster_.radial;
    const int nq = g.n_points;
    const int na = raster_.n_phi;
    const double dphi = raster_.dphi();
    const double sigma = setup_->pump.sigma_um;
    const double k_p = setup_->pump.k_p;
    const auto segs = seg_terms(*setup_);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(raster_.dim());

    std::vector<double> ca(na), sa(na);
    for (int a = 0; a < na; ++a) {
        ca[a] = std::cos(a * dphi);
        sa[a] = std::sin(a * dphi);
    }

    auto process_ring = [&](int j) {
        const Band& b = bands_[j];
        for (int k = b.k_lo; k <= b.k_hi; ++k) {
            const int hw = b.half_window[k - b.k_lo];
            const double w2 = scale_ * scale_ * sw_[j] * sw_[j] * sw_[k] * sw_[k];
            for (int d = -hw; d <= hw; ++d) {
                const PairGeom pg = pair_geom(g.nodes[j], g.nodes[k], d * dphi, sigma);
                if (pg.env * w2 < 1e-300) continue;
                for (int a = 0; a < na; ++a) {
                    const double qx = pg.qx_c * ca[a] + pg.qx_s * sa[a];
                    out(j * na + a) +=
                        w2 * pg.env * pg.env *
                        std::norm(stack_amp(segs, pg.diff2, qx, k_p));
                }
            }
        }
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int j = 0; j < nq; ++j) process_ring(j);
    } else {
        for (int j = 0; j < nq; ++j) process_ring(j);
    }
    return out;
}

void JointKernelOperator::scan_norm() {
    scale_ = 1.0;
    const Eigen::VectorXd rows = row_norms2(Exec::parallel);
    double total = 0.0;
    for (int i = 0; i < rows.size(); ++i) total += rows(i);
    if (total <= 0.0) throw NumericalError("joint kernel: vanishing norm");
    scale_ = 1.0 / std::sqrt(total);
}

namespace {

Eigen::MatrixXcd seeded_gaussian_block(int rows, int cols, uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto uniform = [&rng]() {
        return (static_cast<double>(rng() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
    };
    Eigen::MatrixXcd x(rows, cols);
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r) {
            const double u1 = uniform(), u2 = uniform();
            const double mag = std::sqrt(-2.0 * std::log(u1));
            x(r, c) = Complex(mag * std::cos(kTwoPi * u2), mag * std::sin(kTwoPi * u2));
        }
    return x;
}

Eigen::MatrixXcd thin_q(const Eigen::MatrixXcd& y) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(y);
    return qr.householderQ() * Eigen::MatrixXcd::Identity(y.rows(), y.cols());
}

} // namespace

JointModes joint_schmidt(const JointKernelOperator& op, int top_k, int iterations,
                         uint64_t seed, Exec exec) {
    const int dim = op.dim();
    const int k = std::min(top_k, dim);
    Eigen::MatrixXcd x = thin_q(seeded_gaussian_block(dim, k, seed));
    Eigen::MatrixXcd tmp, y;
    for (int it = 0; it < iterations; ++it) {
        op.apply_adjoint(x, tmp, exec);
        op.apply(tmp, y, exec);
        x = thin_q(y);
    }
    op.apply_adjoint(x, tmp, exec);
    op.apply(tmp, y, exec);

    const Eigen::MatrixXcd h = x.adjoint() * y;  // Rayleigh-Ritz, k x k
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (h + h.adjoint()));
    JointModes modes;
    modes.raster = op.raster();
    modes.lambda.resize(k);
    modes.vectors.resize(dim, k);
    // eigenvalues ascending; flip
    for (int i = 0; i < k; ++i) {
        modes.lambda[i] = std::max(0.0, es.eigenvalues()(k - 1 - i));
        modes.vectors.col(i) = x * es.eigenvectors().col(k - 1 - i);
        modes.captured_weight += modes.lambda[i];
    }
    return modes;
}

std::pair<std::vector<double>, std::vector<double>> Map2d::principal_cut() const {
    const int nq = static_cast<int>(q.size());
    const int na = static_cast<int>(phi.size());
    std::vector<double> theta, inten;
    for (int j = nq - 1; j >= 0; --j) {
        theta.push_back(-q[j] / k_s * 1e3);
        inten.push_back(intensity(j, na / 2));
    }
    for (int j = 0; j < nq; ++j) {
        theta.push_back(q[j] / k_s * 1e3);
        inten.push_back(intensity(j, 0));
    }
    return {theta, inten};
}

Map2d joint_spectrum(const Setup& setup, const JointKernelOperator& op,
                     const JointModes& modes, double gain) {
    const PolarRaster& raster = op.raster();
    const RadialGrid& g = raster.radial;
    const int nq = g.n_points;
    const int na = raster.n_phi;
    const double dphi = raster.dphi();

    Map2d map;
    map.q = g.nodes;
    map.phi.resize(na);
    for (int a = 0; a < na; ++a) map.phi[a] = a * dphi;
    map.k_s = setup.signal_wavenumber;
    map.intensity.setZero(nq, na);

    const double lam1 = modes.lambda.empty() ? 0.0 : modes.lambda.front();
    const bool linear_regime = gain * std::sqrt(lam1) < 0.05;

    if (linear_regime) {
        // sinh^2(G s) -> G^2 s^2 uniformly; the profile is diag(M M^dag),
        // which needs no mode truncation at all
        const Eigen::VectorXd rows = op.row_norms2();
        for (int j = 0; j < nq; ++j) {
            const double wq = g.weights[j] * g.nodes[j] * dphi;
            for (int a = 0; a < na; ++a)
                map.intensity(j, a) = gain * gain * rows(j * na + a) / wq;
        }
        return map;
    }

    for (size_t m = 0; m < modes.lambda.size(); ++m) {
        const double s = std::sinh(gain * std::sqrt(modes.lambda[m]));
        const double w = s * s;
        for (int j = 0; j < nq; ++j) {
            const double wq = g.weights[j] * g.nodes[j] * dphi;
            for (int a = 0; a < na; ++a)
                map.intensity(j, a) += w * std::norm(modes.vectors(j * na + a, m)) / wq;
        }
    }
    return map;
}

} // namespace bsv
