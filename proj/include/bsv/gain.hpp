#pragma once

#include "bsv/schmidt.hpp"

#include <vector>

namespace bsv {

/// Per-mode squeezing coefficients at parametric gain G; r = G sqrt(lambda).
struct GainMode {
    int m = 0;
    int n = 0;
    double lambda = 0.0;
    double cosh_r = 1.0;
    double sinh_r = 0.0;
    double mean_photons = 0.0;  ///< sinh(r)^2
};

struct GainState {
    double gain = 0.0;
    std::vector<GainMode> modes;        ///< same order as the Schmidt entries
    std::vector<double> lambda_tilde;   ///< gain-renormalized weights, sum = 1
    double total_photons = 0.0;
};

GainState bogolyubov(const SchmidtModes& modes, double gain);

/// Gain-renormalized weights sinh^2(G sqrt(l)) / sum sinh^2(G sqrt(l)).
/// The G -> 0 limit returns the normalized input weights.
std::vector<double> renormalized_eigenvalues(const std::vector<double>& lambda, double gain);

/// Inverse participation ratio 1 / sum w_i^2 of normalized weights.
double schmidt_number(const std::vector<double>& weights);

struct GainScanRow {
    double gain = 0.0;
    double schmidt_number = 0.0;
    double total_photons = 0.0;
};
std::vector<GainScanRow> gain_scan(const SchmidtModes& modes,
                                   const std::vector<double>& gains);

} // namespace bsv
