#include "bsv/tpa.hpp"

#include "bsv/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace bsv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct SegmentTerm {
    double length;
    double walkoff;
    bool nonlinear;
};

/// Amplitude of the segment stack for given |q_s - q_i|^2 and (q_s + q_i).x,
/// without pump envelope or normalization.
Complex stack_amplitude(const std::vector<SegmentTerm>& segs, double diff2, double sum_x,
                        double k_p) {
    const double base = diff2 / (2.0 * k_p);
    Complex amp(0.0, 0.0);
    double theta = 0.0;
    for (const SegmentTerm& s : segs) {
        const double mismatch = base + s.walkoff * sum_x;
        const double half = 0.5 * mismatch * s.length;
        if (s.nonlinear)
            amp += std::polar(s.length * sinc(half), theta + half);
        theta += mismatch * s.length;
    }
    return amp;
}

std::vector<SegmentTerm> segment_terms(const Setup& setup) {
    std::vector<SegmentTerm> segs;
    segs.reserve(setup.segments.size());
    for (const Segment& s : setup.segments)
        segs.push_back({s.length_um, s.walkoff_rad, s.is_nonlinear});
    return segs;
}

} // namespace

double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

double pump_envelope(double Q, double sigma) {
    return std::exp(-0.5 * sigma * sigma * Q * Q);
}

Complex tpa_single_crystal(const Eigen::Vector2d& q_s, const Eigen::Vector2d& q_i,
                           const Setup& setup, double norm) {
    const Segment* crystal = nullptr;
    for (const Segment& s : setup.segments) {
        if (!s.is_nonlinear) continue;
        if (crystal) throw ConfigError("tpa_single_crystal: setup has several crystals, "
                                       "use tpa_multi_segment");
        crystal = &s;
    }
    if (!crystal) throw ConfigError("tpa_single_crystal: no crystal segment");
    if (crystal->walkoff_rad != 0.0)
        throw ConfigError("tpa_single_crystal: crystal has walk-off, use tpa_multi_segment");

    const double diff2 = (q_s - q_i).squaredNorm();
    const double x = crystal->length_um * diff2 / (4.0 * setup.pump.k_p);
    const double env = pump_envelope((q_s + q_i).norm(), setup.pump.sigma_um);
    return norm * crystal->length_um * env * std::polar(sinc(x), x);
}

Complex tpa_multi_segment(const Eigen::Vector2d& q_s, const Eigen::Vector2d& q_i,
                          const Setup& setup, double norm) {
    const double env = pump_envelope((q_s + q_i).norm(), setup.pump.sigma_um);
    const auto segs = segment_terms(setup);
    return norm * env *
           stack_amplitude(segs, (q_s - q_i).squaredNorm(), q_s.x() + q_i.x(), setup.pump.k_p);
}

namespace {

/// Samples F(q_s, q_i, dphi) over uniform dphi and projects onto harmonics.
/// Returns per-harmonic values and the kept/total Parseval split for this pair.
struct PairTransform {
    int n_ang;
    int n_max;
    double sigma;
    double k_p;
    std::vector<SegmentTerm> segs;
    std::vector<double> cos_dphi;               // cos(dphi_a)
    std::vector<std::vector<Complex>> twiddle;  // [n + n_max][a] = e^{-i n dphi_a} / n_ang

    PairTransform(const Setup& setup, int n_max_)
        : n_ang(std::max(8, 4 * n_max_)), n_max(n_max_),
          sigma(setup.pump.sigma_um), k_p(setup.pump.k_p), segs(segment_terms(setup)) {
        cos_dphi.resize(n_ang);
        for (int a = 0; a < n_ang; ++a) cos_dphi[a] = std::cos(kTwoPi * a / n_ang);
        twiddle.assign(2 * n_max + 1, std::vector<Complex>(n_ang));
        for (int n = -n_max; n <= n_max; ++n)
            for (int a = 0; a < n_ang; ++a)
                twiddle[n + n_max][a] = std::polar(1.0 / n_ang, -n * kTwoPi * a / n_ang);
    }

    /// Fills out[n + n_max]; returns {kept, total} spectral power of the pair.
    std::pair<double, double> transform(double qs, double qi, std::vector<Complex>& f,
                                        std::vector<Complex>& out) const {
        const double r2 = qs * qs + qi * qi;
        const double cross = 2.0 * qs * qi;
        double total = 0.0;
        for (int a = 0; a < n_ang; ++a) {
            const double sum2 = r2 + cross * cos_dphi[a];
            const double diff2 = r2 - cross * cos_dphi[a];
            const double env = std::exp(-0.5 * sigma * sigma * sum2);
            f[a] = env * stack_amplitude(segs, diff2, 0.0, k_p);
            total += std::norm(f[a]);
        }
        total /= n_ang;
        double kept = 0.0;
        for (int n = -n_max; n <= n_max; ++n) {
            const auto& tw = twiddle[n + n_max];
            Complex acc(0.0, 0.0);
            for (int a = 0; a < n_ang; ++a) acc += f[a] * tw[a];
            out[n + n_max] = acc;
            kept += std::norm(acc);
        }
        return {kept, total};
    }
};

} // namespace

TpaKernel sample_kernel(const Setup& setup, const RadialGrid& grid, Exec exec) {
    if (setup.has_walkoff())
        throw ConfigError("sample_kernel: setup has walk-off; the kernel is no longer a "
                          "function of (phi_s - phi_i) alone — use the joint solver");

    TpaKernel kernel;
    kernel.grid = grid;
    kernel.n_max = grid.n_harmonics;
    const int nh = 2 * kernel.n_max + 1;
    const int nq = grid.n_points;
    kernel.harmonics.assign(nh, Eigen::MatrixXcd(nq, nq));

    const PairTransform pt(setup, kernel.n_max);

    // Per-pair Parseval split, weighted by the radial measure, accumulated in
    // fixed order after the parallel fill so both Exec paths agree bitwise.
    Eigen::MatrixXd kept(nq, nq), total(nq, nq);

    auto process_row = [&](int j) {
        std::vector<Complex> f(pt.n_ang), out(nh);
        for (int k = 0; k < nq; ++k) {
            auto [pk, pt_] = pt.transform(grid.nodes[j], grid.nodes[k], f, out);
            for (int h = 0; h < nh; ++h) kernel.harmonics[h](j, k) = out[h];
            kept(j, k) = pk;
            total(j, k) = pt_;
        }
    };

    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (int j = 0; j < nq; ++j) process_row(j);
    } else {
        for (int j = 0; j < nq; ++j) process_row(j);
    }

    double kept_sum = 0.0, total_sum = 0.0, norm2 = 0.0;
    for (int j = 0; j < nq; ++j) {
        for (int k = 0; k < nq; ++k) {
            const double w = grid.weights[j] * grid.nodes[j] * grid.weights[k] * grid.nodes[k];
            kept_sum += w * kept(j, k);
            total_sum += w * total(j, k);
        }
    }
    kernel.harmonic_loss = (total_sum > 0.0) ? 1.0 - kept_sum / total_sum : 0.0;
    if (kernel.harmonic_loss > setup.grid.harmonic_loss_tol) {
        std::ostringstream msg;
        msg << "sample_kernel: harmonic truncation loss " << kernel.harmonic_loss
            << " exceeds tolerance " << setup.grid.harmonic_loss_tol
            << " (n_max=" << kernel.n_max << " too small for this setup)";
        throw NumericalError(msg.str());
    }

    // normalize to unit total Schmidt weight
    for (int h = 0; h < nh; ++h) {
        const Eigen::MatrixXcd& m = kernel.harmonics[h];
        for (int j = 0; j < nq; ++j)
            for (int k = 0; k < nq; ++k)
                norm2 += grid.weights[j] * grid.nodes[j] * grid.weights[k] * grid.nodes[k] *
                         std::norm(m(j, k));
    }
    norm2 *= kTwoPi * kTwoPi;
    kernel.norm_constant = 1.0 / std::sqrt(norm2);
    for (auto& m : kernel.harmonics) m *= kernel.norm_constant;
    return kernel;
}

std::vector<Complex> angular_project(const std::vector<Complex>& samples, int n_max) {
    const int n_ang = static_cast<int>(samples.size());
    std::vector<Complex> out(2 * n_max + 1);
    for (int n = -n_max; n <= n_max; ++n) {
        Complex acc(0.0, 0.0);
        for (int a = 0; a < n_ang; ++a)
            acc += samples[a] * std::polar(1.0, -n * kTwoPi * a / n_ang);
        out[n + n_max] = acc / double(n_ang);
    }
    return out;
}

std::vector<Eigen::MatrixXcd> resample_harmonic_rows(const Setup& setup,
                                                     const TpaKernel& kernel,
                                                     const std::vector<double>& q_new) {
    const int nh = 2 * kernel.n_max + 1;
    const int nq = kernel.grid.n_points;
    const int nr = static_cast<int>(q_new.size());
    std::vector<Eigen::MatrixXcd> rows(nh, Eigen::MatrixXcd(nr, nq));
    const PairTransform pt(setup, kernel.n_max);

#pragma omp parallel for schedule(static)
    for (int r = 0; r < nr; ++r) {
        std::vector<Complex> f(pt.n_ang), out(nh);
        for (int k = 0; k < nq; ++k) {
            pt.transform(q_new[r], kernel.grid.nodes[k], f, out);
            for (int h = 0; h < nh; ++h) rows[h](r, k) = out[h] * kernel.norm_constant;
        }
    }
    return rows;
}

} // namespace bsv
