#include "bsv/gain.hpp"

#include "bsv/errors.hpp"

#include <cmath>

namespace bsv {

GainState bogolyubov(const SchmidtModes& modes, double gain) {
    if (gain < 0) throw ConfigError("bogolyubov: gain must be >= 0");
    GainState st;
    st.gain = gain;
    st.modes.reserve(modes.entries.size());
    std::vector<double> lambda;
    lambda.reserve(modes.entries.size());
    for (const SchmidtMode& e : modes.entries) {
        const double r = gain * std::sqrt(e.lambda);
        GainMode g;
        g.m = e.m;
        g.n = e.n;
        g.lambda = e.lambda;
        g.cosh_r = std::cosh(r);
        g.sinh_r = std::sinh(r);
        g.mean_photons = g.sinh_r * g.sinh_r;
        st.total_photons += g.mean_photons;
        st.modes.push_back(g);
        lambda.push_back(e.lambda);
    }
    st.lambda_tilde = renormalized_eigenvalues(lambda, gain);
    return st;
}

std::vector<double> renormalized_eigenvalues(const std::vector<double>& lambda, double gain) {
    std::vector<double> out(lambda.size());
    // sinh^2(G sqrt(l)) ~ G^2 l for G sqrt(l) << 1; below the series threshold
    // the renormalization reduces to plain normalization of lambda, which also
    // covers G = 0 without a 0/0.
    double rmax = 0.0;
    for (double l : lambda) rmax = std::max(rmax, gain * std::sqrt(std::max(l, 0.0)));
    double total = 0.0;
    if (rmax < 1e-6) {
        for (size_t i = 0; i < lambda.size(); ++i) total += (out[i] = lambda[i]);
    } else {
        for (size_t i = 0; i < lambda.size(); ++i) {
            const double s = std::sinh(gain * std::sqrt(std::max(lambda[i], 0.0)));
            total += (out[i] = s * s);
        }
    }
    if (total <= 0.0) throw NumericalError("renormalized_eigenvalues: empty or zero weights");
    for (double& v : out) v /= total;
    return out;
}

double schmidt_number(const std::vector<double>& weights) {
    if (weights.empty()) throw NumericalError("schmidt_number: empty weights");
    double s2 = 0.0;
    for (double w : weights) s2 += w * w;
    if (s2 <= 0.0) throw NumericalError("schmidt_number: all weights vanish");
    return 1.0 / s2;
}

std::vector<GainScanRow> gain_scan(const SchmidtModes& modes,
                                   const std::vector<double>& gains) {
    if (gains.empty()) throw ConfigError("gain_scan: empty gain list");
    std::vector<double> lambda;
    lambda.reserve(modes.entries.size());
    for (const SchmidtMode& e : modes.entries) lambda.push_back(e.lambda);

    std::vector<GainScanRow> rows;
    rows.reserve(gains.size());
    for (double g : gains) {
        if (g < 0) throw ConfigError("gain_scan: gains must be >= 0");
        GainScanRow row;
        row.gain = g;
        row.schmidt_number = schmidt_number(renormalized_eigenvalues(lambda, g));
        double total = 0.0;
        for (double l : lambda) {
            const double s = std::sinh(g * std::sqrt(l));
            total += s * s;
        }
        row.total_photons = total;
        rows.push_back(row);
    }
    return rows;
}

} // namespace bsv
