#include "bsv/observables.hpp"

#include "bsv/errors.hpp"
#include "bsv/tpa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bsv {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

int PixelCut::index_of(double theta0_mrad) const {
    for (size_t i = 0; i < theta_mrad.size(); ++i)
        if (std::abs(theta_mrad[i] - theta0_mrad) < 0.5 * width_mrad)
            return static_cast<int>(i);
    std::ostringstream msg;
    msg << "pixel cut: angle " << theta0_mrad << " mrad is off-grid (range +-"
        << theta_mrad.back() << ", step " << width_mrad << ")";
    throw ConfigError(msg.str());
}

PixelCut make_pixel_cut(const Setup& setup, double theta_max_mrad, double width_mrad,
                        double azimuth) {
    if (width_mrad <= 0 || theta_max_mrad <= width_mrad)
        throw ConfigError("pixel cut: need width > 0 and theta_max > width");
    PixelCut cut;
    cut.width_mrad = width_mrad;
    cut.azimuth = azimuth;
    const double k_s = setup.signal_wavenumber;
    cut.area = (k_s * width_mrad * 1e-3) * (k_s * width_mrad * 1e-3);
    const int m = static_cast<int>(std::floor(theta_max_mrad / width_mrad + 1e-9));
    for (int j = -m; j <= m; ++j) {
        const double theta = j * width_mrad;
        cut.theta_mrad.push_back(theta);
        // the zero pixel straddles the origin; use a representative interior
        // radius so the mode functions stay finite
        const double qabs = std::max(std::abs(theta), 0.25 * width_mrad) * 1e-3 * k_s;
        cut.q_center.push_back(qabs);
        cut.phi.push_back(theta >= 0.0 ? azimuth : azimuth + std::numbers::pi);
    }
    return cut;
}

ModeOverlaps pixel_mode_overlaps(const Setup& setup, const TpaKernel& kernel,
                                 const SchmidtModes& modes, const PixelCut& cut) {
    const int npix = static_cast<int>(cut.theta_mrad.size());
    const int nmodes = static_cast<int>(modes.entries.size());
    const RadialGrid& grid = modes.grid;
    const int nq = grid.n_points;

    ModeOverlaps out;
    out.cut = cut;
    out.c.resize(npix, nmodes);
    out.partner.resize(nmodes);
    out.lambda.resize(nmodes);
    for (int i = 0; i < nmodes; ++i) {
        out.partner[i] = modes.entries[i].partner;
        out.lambda[i] = modes.entries[i].lambda;
    }

    const auto rows = resample_harmonic_rows(setup, kernel, cut.q_center);

    // Nystrom: u(q) = (2 pi / s) sqrt(q) sum_k w_k chi_n(q, q_k) sqrt(q_k) u(q_k)
    Eigen::VectorXcd wu(nq);
    for (int i = 0; i < nmodes; ++i) {
        const SchmidtMode& e = modes.entries[i];
        for (int k = 0; k < nq; ++k)
            wu(k) = grid.weights[k] * std::sqrt(grid.nodes[k]) * e.u(k);
        const Eigen::VectorXcd uc = rows[e.n + kernel.n_max] * wu;
        const double inv_s = 1.0 / std::sqrt(e.lambda);
        for (int p = 0; p < npix; ++p) {
            // c_{p,mode} = sqrt(A) u(q_p) e^{i n phi_p} / sqrt(2 pi q_p)
            const double qc = cut.q_center[p];
            const Complex u_at = kTwoPi * inv_s * std::sqrt(qc) * uc(p);
            out.c(p, i) = std::sqrt(cut.area) / std::sqrt(kTwoPi * qc) * u_at *
                          std::polar(1.0, e.n * cut.phi[p]);
        }
    }
    return out;
}

MomentTables correlators(const ModeOverlaps& ov, double gain, Exec exec) {
    const int npix = static_cast<int>(ov.c.rows());
    const int nmodes = static_cast<int>(ov.c.cols());
    MomentTables t;
    t.cut = ov.cut;
    t.gain = gain;
    t.n.setZero(npix);
    t.c.setZero(npix, npix);
    t.s.setZero(npix, npix);

    Eigen::VectorXd sh(nmodes), ch(nmodes);
    for (int i = 0; i < nmodes; ++i) {
        const double r = gain * std::sqrt(ov.lambda[i]);
        sh(i) = std::sinh(r);
        ch(i) = std::cosh(r);
    }

    auto fill_row = [&](int p) {
        for (int q = 0; q < npix; ++q) {
            Complex cc(0.0, 0.0), ss(0.0, 0.0);
            for (int i = 0; i < nmodes; ++i) {
                const double s2 = sh(i) * sh(i);
                cc += std::conj(ov.c(p, i)) * ov.c(q, i) * s2;
                ss += ov.c(p, i) * ov.c(q, ov.partner[i]) * (sh(i) * ch(i));
            }
            t.c(p, q) = cc;
            t.s(p, q) = ss;
        }
    };

    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (int p = 0; p < npix; ++p) fill_row(p);
    } else {
        for (int p = 0; p < npix; ++p) fill_row(p);
    }
    for (int p = 0; p < npix; ++p) t.n(p) = t.c(p, p).real();
    return t;
}

MomentColumn correlator_column(const ModeOverlaps& ov, double gain, int p0) {
    const int npix = static_cast<int>(ov.c.rows());
    const int nmodes = static_cast<int>(ov.c.cols());
    MomentColumn col;
    col.p0 = p0;
    col.n.setZero(npix);
    col.c.setZero(npix);
    col.s.setZero(npix);
    Eigen::VectorXd sh(nmodes), ch(nmodes);
    for (int i = 0; i < nmodes; ++i) {
        const double r = gain * std::sqrt(ov.lambda[i]);
        sh(i) = std::sinh(r);
        ch(i) = std::cosh(r);
    }
    for (int p = 0; p < npix; ++p) {
        Complex cc(0.0, 0.0), ss(0.0, 0.0);
        double nn = 0.0;
        for (int i = 0; i < nmodes; ++i) {
            const double s2 = sh(i) * sh(i);
            nn += std::norm(ov.c(p, i)) * s2;
            cc += std::conj(ov.c(p, i)) * ov.c(p0, i) * s2;
            ss += ov.c(p, i) * ov.c(p0, ov.partner[i]) * (sh(i) * ch(i));
        }
        col.n(p) = nn;
        col.c(p) = cc;
        col.s(p) = ss;
    }
    return col;
}

double covariance(const MomentTables& t, int p, int q) {
    if (p == q) return variance(t, p);
    return std::norm(t.c(p, q)) + std::norm(t.s(p, q));
}

double variance(const MomentTables& t, int p) {
    const double n = t.c(p, p).real();
    return n * n + n + std::norm(t.s(p, p));
}

double g2(const MomentTables& t, int p, int q) {
    const double np = t.n(p), nq = t.n(q);
    if (np <= 0.0 || nq <= 0.0)
        throw NumericalError("g2: zero mean photon number at a requested pixel");
    if (p == q) {
        const double n2 = 2.0 * np * np + np + std::norm(t.s(p, p));  // <N^2>
        return n2 / (np * np);
    }
    return 1.0 + (std::norm(t.c(p, q)) + std::norm(t.s(p, q))) / (np * nq);
}

AngularSpectrum variance_difference(const MomentTables& t, double theta0_mrad) {
    const int p0 = t.cut.index_of(theta0_mrad);
    const int npix = static_cast<int>(t.cut.theta_mrad.size());
    AngularSpectrum out;
    out.theta_mrad = t.cut.theta_mrad;
    out.intensity.resize(npix);
    const double var0 = variance(t, p0);
    for (int p = 0; p < npix; ++p) {
        if (p == p0) {
            out.intensity[p] = 0.0;
            continue;
        }
        out.intensity[p] = variance(t, p) + var0 - 2.0 * covariance(t, p, p0);
    }
    const double peak = *std::max_element(out.intensity.begin(), out.intensity.end());
    if (peak > 0.0)
        for (double& v : out.intensity) v /= peak;
    out.norm = AngularSpectrum::Norm::max1;
    return out;
}

Eigen::VectorXd spectrum_at_nodes(const SchmidtModes& modes, double gain) {
    const int nq = modes.grid.n_points;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(nq);
    for (const SchmidtMode& e : modes.entries) {
        const double s = std::sinh(gain * std::sqrt(e.lambda));
        const double w = s * s;
        for (int k = 0; k < nq; ++k) out(k) += w * std::norm(e.u(k));
    }
    for (int k = 0; k < nq; ++k) out(k) /= kTwoPi * modes.grid.nodes[k];
    return out;
}

AngularSpectrum mean_photon_spectrum(const Setup& setup, const TpaKernel& kernel,
                                     const SchmidtModes& modes, double gain,
                                     double theta_max_mrad, double step_mrad,
                                     AngularSpectrum::Norm norm) {
    AngularSpectrum out;
    out.norm = norm;
    const double k_s = setup.signal_wavenumber;
    std::vector<double> q_pos;
    const int m = static_cast<int>(std::floor(theta_max_mrad / step_mrad + 1e-9));
    for (int j = 1; j <= m; ++j) q_pos.push_back(j * step_mrad * 1e-3 * k_s);

    const auto rows = resample_harmonic_rows(setup, kernel, q_pos);
    const int nq = modes.grid.n_points;
    Eigen::VectorXd dens = Eigen::VectorXd::Zero(m);
    Eigen::VectorXcd wu(nq);
    for (const SchmidtMode& e : modes.entries) {
        for (int k = 0; k < nq; ++k)
            wu(k) = modes.grid.weights[k] * std::sqrt(modes.grid.nodes[k]) * e.u(k);
        const Eigen::VectorXcd uc = rows[e.n + kernel.n_max] * wu;
        const double s = std::sinh(gain * std::sqrt(e.lambda));
        const double inv_s2 = 1.0 / e.lambda;
        for (int j = 0; j < m; ++j) {
            const double u2 = kTwoPi * kTwoPi * inv_s2 * q_pos[j] * std::norm(uc(j));
            dens(j) += s * s * u2 / (kTwoPi * q_pos[j]);
        }
    }
    // mirrored cut through zero
    for (int j = m - 1; j >= 0; --j) {
        out.theta_mrad.push_back(-(j + 1) * step_mrad);
        out.intensity.push_back(dens(j));
    }
    for (int j = 0; j < m; ++j) {
        out.theta_mrad.push_back((j + 1) * step_mrad);
        out.intensity.push_back(dens(j));
    }
    if (norm == AngularSpectrum::Norm::max1) {
        const double peak = *std::max_element(out.intensity.begin(), out.intensity.end());
        if (peak > 0.0)
            for (double& v : out.intensity) v /= peak;
    }
    return out;
}

double covariance_fwhm(const ModeOverlaps& ov, double gain) {
    // locate the spectrum peak pixel
    const int npix = static_cast<int>(ov.c.rows());
    MomentColumn probe = correlator_column(ov, gain, npix / 2);
    int p0 = 0;
    for (int p = 1; p < npix; ++p)
        if (probe.n(p) > probe.n(p0)) p0 = p;
    MomentColumn col = correlator_column(ov, gain, p0);

    std::vector<double> prof(npix);
    for (int p = 0; p < npix; ++p) prof[p] = std::norm(col.c(p)) + std::norm(col.s(p));

    const double half = 0.5 * prof[p0];
    const auto& th = ov.cut.theta_mrad;
    auto cross = [&](int dir) -> double {
        int p = p0;
        while (p + dir >= 0 && p + dir < npix) {
            const int q = p + dir;
            if (prof[q] < half) {
                const double f = (prof[p] - half) / (prof[p] - prof[q]);
                return th[p] + f * (th[q] - th[p]);
            }
            p = q;
        }
        throw NumericalError("covariance_fwhm: half level not crossed inside the cut "
                             "(enlarge pixels.theta_max_mrad)");
    };
    const double right = cross(+1);
    const double left = cross(-1);
    const double fwhm = right - left;
    if (fwhm < 2.0 * ov.cut.width_mrad)
        throw NumericalError("covariance_fwhm: covariance peak narrower than two pixels");
    return fwhm;
}

double central_peak_fwhm(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    int i0 = 0;
    for (int i = 1; i < n; ++i)
        if (y[i] > y[i0]) i0 = i;
    const double half = 0.5 * y[i0];
    auto cross = [&](int dir) -> double {
        int i = i0;
        while (i + dir >= 0 && i + dir < n) {
            const int j = i + dir;
            if (y[j] < half) {
                const double f = (y[i] - half) / (y[i] - y[j]);
                return x[i] + f * (x[j] - x[i]);
            }
            i = j;
        }
        throw NumericalError("central_peak_fwhm: half level not crossed");
    };
    return cross(+1) - cross(-1);
}

} // namespace bsv
