#include "bsv/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bsv {

Quadrature gauss_legendre(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    if (!(b > a)) throw std::invalid_argument("gauss_legendre: need b > a");

    Quadrature q;
    q.nodes.resize(n);
    q.weights.resize(n);

    // Newton iteration on P_n, one root per quadrant index; roots are symmetric
    // so only the lower half is computed.
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        // map [-1,1] -> [a,b]; x is a root in (0,1], mirror for the upper half
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        q.nodes[i] = mid - half * x;
        q.nodes[n - 1 - i] = mid + half * x;
        q.weights[i] = half * w;
        q.weights[n - 1 - i] = half * w;
    }
    return q;
}

} // namespace bsv
